"""Range-velocity map construction from frequency-agile pulse trains.

Processing chain: pulse compression in the frequency domain, a bank of
velocity hypotheses (each applying chirp-coupling compensation and
range-cell-migration correction), per-carrier coherent integration,
stitching the per-carrier bands into one wideband synthetic spectrum,
and an inverse transform to a high-resolution range profile per
hypothesis. Stacking profiles over hypotheses yields the map: a
scatterer at velocity v focuses (peaks) on the row whose hypothesis
matches v and smears elsewhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .echo import HopCode, PulseTrain, baseband_grid, reference_spectrum
from .params import C, RadarParams, carrier_frequency

__all__ = [
    "CompressedSpectra",
    "StitchedSpectrum",
    "RVMap",
    "pulse_compress",
    "doppler_compensate",
    "rcm_correct",
    "coherent_integrate",
    "stitch_spectrum",
    "synthesize_hrrp",
    "velocity_grid",
    "build_rv_map",
    "write_rv_map_npz",
    "read_rv_map_npz",
    "write_rv_map_csv",
    "render_rv_map_png",
]


@dataclass
class CompressedSpectra:
    """Per-pulse baseband spectra after matched filtering (fftfreq bin order)."""

    spectra: np.ndarray       # (n_pulses, n_fast) complex
    code: HopCode
    params: RadarParams
    gate_range: float = 0.0

    def __post_init__(self) -> None:
        self.spectra = np.asarray(self.spectra, dtype=np.complex128)
        if self.spectra.shape != (self.params.n_pulses, self.params.n_fast):
            raise ValueError("spectra must be (n_pulses, n_fast)")
        if len(self.code) != self.params.n_pulses:
            raise ValueError("hop code length must equal the pulse count")

    def replace_spectra(self, spectra: np.ndarray) -> "CompressedSpectra":
        return CompressedSpectra(spectra, self.code, self.params, self.gate_range)


def pulse_compress(train: PulseTrain) -> CompressedSpectra:
    """Matched-filter each pulse record against the chirp reference.

    Works in the frequency domain: FFT of the record times the conjugate
    reference spectrum. The quadratic chirp phase cancels exactly,
    leaving per-scatterer linear phases exp(-j*2*pi*(f_n+f)*tau) scaled
    by 1/mu inside the band and zero outside it.
    """
    fvec = baseband_grid(train.params)
    sref = reference_spectrum(train.params, fvec)
    spectra = np.fft.fft(train.pulses, axis=1) * np.conj(sref)[None, :]
    return CompressedSpectra(spectra, train.code, train.params, train.gate_range)


def _carrier_freqs(code: HopCode, params: RadarParams) -> np.ndarray:
    return np.array([carrier_frequency(params, c) for c in code.codes])


def doppler_compensate(spectra: CompressedSpectra, v: float) -> CompressedSpectra:
    """Cancel the chirp range-Doppler coupling for hypothesis velocity v.

    An approaching scatterer's Doppler shift rides through the chirp as
    an apparent delay f_d/mu; multiplying by exp(+j*2*pi*f*2*v*f_n/(c*mu))
    removes that envelope shift when the hypothesis matches.
    """
    if v == 0.0:
        return spectra.replace_spectra(spectra.spectra.copy())
    p = spectra.params
    fvec = baseband_grid(p)
    fc = _carrier_freqs(spectra.code, p)
    phase = (2.0 * math.pi * 2.0 * v / (C * p.mu)) * fc[:, None] * fvec[None, :]
    return spectra.replace_spectra(spectra.spectra * np.exp(1j * phase))


def rcm_correct(spectra: CompressedSpectra, v: float) -> CompressedSpectra:
    """Undo range cell migration for hypothesis velocity v.

    Multiplies pulse n by exp(+j*2*pi*(f_n+f)*2*v*n*Tr/c), cancelling
    both the carrier Doppler phase progression and the in-band walk of
    the envelope across the burst when the hypothesis matches.
    """
    if v == 0.0:
        return spectra.replace_spectra(spectra.spectra.copy())
    p = spectra.params
    fvec = baseband_grid(p)
    fc = _carrier_freqs(spectra.code, p)
    slow = np.arange(p.n_pulses) * p.tr
    phase = (2.0 * math.pi * 2.0 * v / C) * (fc[:, None] + fvec[None, :]) * slow[:, None]
    return spectra.replace_spectra(spectra.spectra * np.exp(1j * phase))


def coherent_integrate(spectra: CompressedSpectra) -> np.ndarray:
    """Average the compensated spectra pulse-wise within each carrier.

    Returns an (n_carriers, n_fast) array ordered by carrier index. A
    matched velocity hypothesis makes all pulses of a carrier identical,
    so the mean preserves the signal while averaging down mismatched
    energy and noise.
    """
    p = spectra.params
    out = np.empty((p.n_carriers, p.n_fast), dtype=np.complex128)
    for i in range(p.n_carriers):
        rows = spectra.code.codes == i
        out[i] = spectra.spectra[rows].mean(axis=0)
    return out


@dataclass
class StitchedSpectrum:
    """Wideband synthetic spectrum on a uniform absolute-frequency grid."""

    samples: np.ndarray    # (n_bins,) complex
    freqs: np.ndarray      # (n_bins,) absolute frequency, Hz
    fill_mask: np.ndarray  # (n_bins,) bool, True where a carrier band contributed
    params: RadarParams

    def __post_init__(self) -> None:
        if not (len(self.samples) == len(self.freqs) == len(self.fill_mask)):
            raise ValueError("samples, freqs and fill_mask must have equal length")


def _stitch_layout(params: RadarParams) -> tuple[int, int, int, np.ndarray]:
    """Return (stride, m_lo, n_bins, inband_bins) for band stitching.

    stride is the carrier spacing in fast-frequency grid cells; it must
    be an integer (commensurate grids) and at least the per-carrier
    in-band bin count (non-overlapping bands).
    """
    df = params.grid_df
    stride_f = params.delta_f / df
    stride = int(round(stride_f))
    if abs(stride_f - stride) > 1e-6:
        raise ValueError(
            "carrier spacing is not an integer number of fast-frequency grid cells"
        )
    m_lo = int(math.ceil(-params.b / 2.0 / df - 1e-9))
    m_hi = int(math.ceil(params.b / 2.0 / df - 1e-9)) - 1
    inband = np.arange(m_lo, m_hi + 1)
    if len(inband) > stride:
        raise ValueError("carrier bands overlap: per-pulse bandwidth exceeds carrier spacing")
    n_bins = (params.n_carriers - 1) * stride + len(inband)
    return stride, m_lo, n_bins, inband


def stitch_spectrum(integrated: np.ndarray, params: RadarParams) -> StitchedSpectrum:
    """Tile per-carrier in-band spectra onto one wideband frequency axis.

    Carrier i's in-band bins land at synthetic indices i*stride + (m - m_lo);
    bins no carrier covers stay zero with fill_mask False. The result's
    frequency axis is uniform with the fast-frequency grid pitch.
    """
    integrated = np.asarray(integrated, dtype=np.complex128)
    if integrated.shape != (params.n_carriers, params.n_fast):
        raise ValueError("integrated spectra must be (n_carriers, n_fast)")
    stride, m_lo, n_bins, inband = _stitch_layout(params)
    cols = inband % params.n_fast       # signed bin -> fftfreq storage column
    samples = np.zeros(n_bins, dtype=np.complex128)
    fill = np.zeros(n_bins, dtype=bool)
    for i in range(params.n_carriers):
        j = i * stride + (inband - m_lo)
        if j[0] < 0 or j[-1] >= n_bins:
            raise ValueError("stitch indices fall outside the synthetic axis")
        samples[j] = integrated[i, cols]
        fill[j] = True
    f_start = params.f0 + m_lo * params.grid_df
    freqs = f_start + np.arange(n_bins) * params.grid_df
    return StitchedSpectrum(samples, freqs, fill, params)


def _spectral_window(n: int, window: str) -> np.ndarray:
    if window == "rect":
        return np.ones(n)
    if window == "hann":
        return 0.5 - 0.5 * np.cos(2.0 * math.pi * np.arange(n) / n)
    raise ValueError(f"unknown window {window!r}; use 'hann' or 'rect'")


def synthesize_hrrp(
    stitched: StitchedSpectrum,
    pad_factor: int = 4,
    window: str = "hann",
) -> tuple[np.ndarray, np.ndarray]:
    """Inverse-transform a stitched spectrum to a high-resolution range profile.

    Returns (ranges, profile): ranges are relative to the receive-window
    start with pitch c/(2*pad_factor*n_bins*grid_df); profile is the
    magnitude, scaled so a unit scatterer peaks near sigma/mu under the
    rectangular window. The span is one unambiguous window c/(2*grid_df).
    """
    if pad_factor < 1:
        raise ValueError("pad_factor must be >= 1")
    n = len(stitched.samples)
    w = _spectral_window(n, window)
    padded = np.zeros(n * pad_factor, dtype=np.complex128)
    padded[:n] = stitched.samples * w
    profile = np.abs(np.fft.ifft(padded)) * pad_factor
    df = stitched.params.grid_df
    ranges = np.arange(n * pad_factor) * C / (2.0 * pad_factor * n * df)
    return ranges, profile


def velocity_grid(params: RadarParams, v_max: float = 3.0) -> np.ndarray:
    """Velocity hypotheses: integer multiples of delta_v covering [-v_max, v_max]."""
    if v_max < 0.0:
        raise ValueError("v_max must be non-negative")
    k_max = int(math.floor(v_max / params.delta_v + 1e-9))
    return np.arange(-k_max, k_max + 1) * params.delta_v


@dataclass
class RVMap:
    """Range-velocity magnitude map with absolute axes."""

    matrix: np.ndarray         # (n_velocity, n_range) float
    velocity_axis: np.ndarray  # m/s, ascending
    range_axis: np.ndarray     # absolute range, m, ascending
    params: RadarParams
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.shape != (len(self.velocity_axis), len(self.range_axis)):
            raise ValueError("matrix shape must match the velocity and range axes")


def build_rv_map(
    train: PulseTrain,
    v_max: float = 3.0,
    pad_factor: int = 4,
    window: str = "hann",
) -> RVMap:
    """Build the range-velocity map for one pulse train.

    Each row applies both velocity compensations at one hypothesis, then
    per-carrier integration, stitching, and the range transform. The
    combined compensation phase is linear in v, so rows are generated by
    stepping a single per-(pulse, bin) phase increment outward from the
    exact v = 0 row instead of re-exponentiating per row.
    """
    p = train.params
    pc = pulse_compress(train)
    vgrid = velocity_grid(p, v_max)
    k_max = (len(vgrid) - 1) // 2

    fvec = baseband_grid(p)
    fc = _carrier_freqs(train.code, p)
    slow = np.arange(p.n_pulses) * p.tr
    # Combined per-unit-velocity phase: chirp-coupling + migration terms.
    psi = (2.0 * math.pi * 2.0 / C) * (
        fc[:, None] * fvec[None, :] / p.mu
        + (fc[:, None] + fvec[None, :]) * slow[:, None]
    )
    step = np.exp(1j * p.delta_v * psi)

    stride, m_lo, n_bins, inband = _stitch_layout(p)
    cols = inband % p.n_fast
    groups = [np.flatnonzero(train.code.codes == i) for i in range(p.n_carriers)]
    w = _spectral_window(n_bins, window)
    n_pad = n_bins * pad_factor

    def profile_of(spectra: np.ndarray) -> np.ndarray:
        stitched = np.zeros(n_bins, dtype=np.complex128)
        for i, rows in enumerate(groups):
            stitched[i * stride + (inband - m_lo)] = spectra[rows].mean(axis=0)[cols]
        padded = np.zeros(n_pad, dtype=np.complex128)
        padded[:n_bins] = stitched * w
        return np.abs(np.fft.ifft(padded)) * pad_factor

    matrix = np.empty((len(vgrid), n_pad))
    matrix[k_max] = profile_of(pc.spectra)
    up = pc.spectra.copy()
    down = pc.spectra.copy()
    for k in range(1, k_max + 1):
        up *= step
        down *= np.conj(step)
        matrix[k_max + k] = profile_of(up)
        matrix[k_max - k] = profile_of(down)

    range_axis = train.gate_range + np.arange(n_pad) * C / (2.0 * pad_factor * n_bins * p.grid_df)
    return RVMap(matrix, vgrid, range_axis, p, meta={"gate_range": train.gate_range})


# -- map interchange ------------------------------------------------------


def write_rv_map_npz(rvmap: RVMap, path: str) -> None:
    p = rvmap.params
    np.savez_compressed(
        path,
        matrix=rvmap.matrix,
        velocity_axis=rvmap.velocity_axis,
        range_axis=rvmap.range_axis,
        params=np.array(
            [p.f0, p.n_carriers, p.delta_f, p.tp, p.fs, p.b, p.tr, p.n_pulses, p.scr_db]
        ),
        meta=np.array(json.dumps(rvmap.meta)),
    )


def read_rv_map_npz(path: str) -> RVMap:
    with np.load(path, allow_pickle=False) as data:
        raw = data["params"]
        params = RadarParams(
            f0=float(raw[0]), n_carriers=int(raw[1]), delta_f=float(raw[2]),
            tp=float(raw[3]), fs=float(raw[4]), b=float(raw[5]), tr=float(raw[6]),
            n_pulses=int(raw[7]), scr_db=float(raw[8]),
        )
        meta = json.loads(str(data["meta"]))
        return RVMap(data["matrix"], data["velocity_axis"], data["range_axis"], params, meta)


def write_rv_map_csv(rvmap: RVMap, path: str) -> None:
    """CSV layout: first column velocity (m/s), first row range axis (m)."""
    header = "velocity_mps\\range_m," + ",".join(f"{r:.6f}" for r in rvmap.range_axis)
    body = np.column_stack([rvmap.velocity_axis, rvmap.matrix])
    np.savetxt(path, body, delimiter=",", header=header, comments="", fmt="%.9e")


def render_rv_map_png(
    rvmap: RVMap,
    path: str,
    dynamic_range_db: float = 40.0,
    range_window: tuple[float, float] | None = None,
) -> None:
    """Render the map magnitude in dB below its peak to a PNG file."""
    from matplotlib.backends.backend_agg import FigureCanvasAgg
    from matplotlib.figure import Figure

    matrix = rvmap.matrix
    ranges = rvmap.range_axis
    if range_window is not None:
        keep = (ranges >= range_window[0]) & (ranges <= range_window[1])
        if not keep.any():
            raise ValueError("range_window selects no map columns")
        matrix = matrix[:, keep]
        ranges = ranges[keep]
    peak = matrix.max()
    if peak <= 0.0:
        raise ValueError("cannot render an all-zero map")
    db = 20.0 * np.log10(np.maximum(matrix / peak, 10.0 ** (-dynamic_range_db / 20.0 - 1)))

    fig = Figure(figsize=(9.0, 4.5))
    canvas = FigureCanvasAgg(fig)
    ax = fig.add_subplot(111)
    im = ax.imshow(
        db,
        aspect="auto",
        origin="lower",
        extent=(ranges[0], ranges[-1], rvmap.velocity_axis[0], rvmap.velocity_axis[-1]),
        vmin=-dynamic_range_db,
        vmax=0.0,
        cmap="viridis",
    )
    ax.set_xlabel("range (m)")
    ax.set_ylabel("radial velocity (m/s)")
    fig.colorbar(im, ax=ax, label="dB")
    fig.tight_layout()
    canvas.print_png(path)
