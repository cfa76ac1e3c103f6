"""Radar waveform and timing parameters shared by every pipeline stage."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

C = 299792458.0  # propagation speed, m/s


@dataclass(frozen=True)
class RadarParams:
    """Frequency-agile LFM burst description.

    The defaults reproduce the desk configuration used throughout the
    test-suite: a Ku-band burst of 256 pulses hopping over 8 carriers,
    25 MHz per-pulse bandwidth stitched into a 200 MHz synthetic band.
    """

    f0: float = 16.0e9        # lowest carrier, Hz
    n_carriers: int = 8       # number of agile carriers M
    delta_f: float = 25.0e6   # carrier spacing, Hz
    tp: float = 36.0e-6       # pulse width, s
    fs: float = 50.0e6        # complex sampling rate, Hz
    b: float = 25.0e6         # per-pulse swept bandwidth, Hz (defaults to delta_f)
    tr: float = 250.0e-6      # pulse repetition interval, s
    n_pulses: int = 256       # pulses per burst N
    scr_db: float = 20.0      # signal-to-clutter ratio, dB (math.inf = clutter-free)

    def __post_init__(self) -> None:
        for name in ("f0", "delta_f", "tp", "fs", "b", "tr"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.n_carriers < 1:
            raise ValueError("n_carriers must be >= 1")
        if self.n_pulses < self.n_carriers:
            raise ValueError("n_pulses must be >= n_carriers so every carrier can appear")
        if self.b > self.fs:
            raise ValueError("sampling rate fs must cover the swept bandwidth b")
        if self.tp >= self.tr:
            raise ValueError("pulse width tp must be shorter than the repetition interval tr")
        if math.isnan(self.scr_db):
            raise ValueError("scr_db must be a number or +inf")

    # -- derived waveform quantities -------------------------------------

    @property
    def mu(self) -> float:
        """Chirp rate b/tp, Hz/s."""
        return self.b / self.tp

    @property
    def n_fast(self) -> int:
        """Fast-time samples per pulse record, ceil(tp*fs)."""
        return int(math.ceil(self.tp * self.fs - 1e-9))

    @property
    def grid_df(self) -> float:
        """Baseband FFT bin spacing fs/n_fast, Hz."""
        return self.fs / self.n_fast

    @property
    def b_synth(self) -> float:
        """Synthetic bandwidth M*delta_f, Hz."""
        return self.n_carriers * self.delta_f

    @property
    def wavelength(self) -> float:
        """Carrier wavelength c/f0, m."""
        return C / self.f0

    @property
    def delta_r(self) -> float:
        """Synthetic range resolution c/(2*M*delta_f), m."""
        return C / (2.0 * self.b_synth)

    @property
    def delta_v(self) -> float:
        """Velocity resolution lambda/(2*N*Tr), m/s."""
        return self.wavelength / (2.0 * self.n_pulses * self.tr)

    @property
    def cpi(self) -> float:
        """Coherent processing interval N*Tr, s."""
        return self.n_pulses * self.tr

    @property
    def window_delay(self) -> float:
        """Unambiguous delay extent of one pulse record, s."""
        return self.n_fast / self.fs

    @property
    def window_range(self) -> float:
        """Unambiguous range extent of the receive window, m."""
        return C * self.window_delay / 2.0

    def with_scr(self, scr_db: float) -> "RadarParams":
        return replace(self, scr_db=scr_db)


def carrier_frequency(params: RadarParams, code: int) -> float:
    """Carrier of pulse with hop code ``code``: f0 + code*delta_f."""
    code = int(code)
    if not 0 <= code < params.n_carriers:
        raise ValueError(f"hop code {code} outside [0, {params.n_carriers})")
    return params.f0 + code * params.delta_f
