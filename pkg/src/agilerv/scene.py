"""Sea-surface target scenes: geometry, attitude motion, and LOS projection.

A scene is a set of rigid units (a single hull, or several independent
floating reflectors) observed from a far-field radar. Sea-state driven
attitude motion rotates each unit about its pivot; projecting every body
point onto the line of sight yields the (range, radial velocity) state
that the echo synthesizer consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SHIP = "ship"
REFLECTOR_ARRAY = "reflector_array"
_KINDS = (SHIP, REFLECTOR_ARRAY)

# Keel stations, m. Non-uniform (bow/stern dominant) so the position spread
# matches the reflector array's 44.72 m; equispaced stations would hand the
# classifier a motion-independent sigma_r fingerprint.
SHIP_STATIONS = (-72.0, -45.7, -25.0, -10.0, 10.0, 25.0, 45.7, 72.0)


@dataclass(frozen=True)
class ObservationGeometry:
    """Radar placement relative to the scene origin."""

    r0: float = 10_000.0   # centroid range, m
    theta_deg: float = 45.0  # azimuth from the bow axis, deg
    phi_deg: float = 2.0     # grazing elevation, deg

    def __post_init__(self) -> None:
        if self.r0 <= 0.0:
            raise ValueError("r0 must be positive")

    def los_unit(self) -> np.ndarray:
        """Unit vector from scene origin toward the radar."""
        th = math.radians(self.theta_deg)
        ph = math.radians(self.phi_deg)
        return np.array(
            [math.cos(ph) * math.cos(th), math.cos(ph) * math.sin(th), math.sin(ph)]
        )


@dataclass(frozen=True)
class SeaState:
    hs: float = 1.0  # significant wave height, m
    seed: int = 0

    def __post_init__(self) -> None:
        if self.hs < 0.0:
            raise ValueError("hs must be non-negative")


@dataclass(frozen=True)
class MotionModel:
    """Per-channel attitude amplitude budget (deg per metre of hs) and periods."""

    roll_amp_deg: float
    pitch_amp_deg: float
    yaw_amp_deg: float
    period_lo: float
    period_hi: float
    max_components: int = 3


SHIP_MOTION = MotionModel(2.0, 1.0, 0.5, 6.0, 12.0)
# Small floaters respond harder and faster to the same sea.
REFLECTOR_MOTION = MotionModel(6.0, 3.0, 1.5, 2.0, 5.0)


@dataclass
class AttitudeSeries:
    """Roll/pitch/yaw angle series (radians) on a uniform slow-time grid."""

    times: np.ndarray
    roll: np.ndarray
    pitch: np.ndarray
    yaw: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.times)
        for name in ("roll", "pitch", "yaw"):
            ch = getattr(self, name)
            if len(ch) != n:
                raise ValueError("attitude channels must share the time grid")
            if not np.all(np.isfinite(ch)):
                raise ValueError(f"{name} contains non-finite values")
            if np.any(np.abs(ch) >= math.pi / 2):
                raise ValueError(f"{name} exceeds +-pi/2; small-attitude model violated")


def _unit_rng(sea: SeaState, kind: str, unit_index: int) -> np.random.Generator:
    kind_code = _KINDS.index(kind)
    return np.random.default_rng(
        np.random.SeedSequence(sea.seed, spawn_key=(kind_code, unit_index))
    )


def generate_attitude(
    sea: SeaState,
    kind: str,
    unit_index: int,
    duration: float,
    n_samples: int,
    motion: MotionModel | None = None,
) -> AttitudeSeries:
    """Draw one attitude realization for a unit.

    Each channel is a sum of 1..3 sinusoids whose amplitudes split the
    channel budget (amplitude scales linearly with hs) with periods and
    phases drawn uniformly. The RNG stream depends only on
    (sea.seed, kind, unit_index), so hs rescales a fixed realization.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown target kind {kind!r}")
    if n_samples < 2:
        raise ValueError("need at least two slow-time samples")
    if duration <= 0.0:
        raise ValueError("duration must be positive")
    if motion is None:
        motion = SHIP_MOTION if kind == SHIP else REFLECTOR_MOTION
    rng = _unit_rng(sea, kind, unit_index)
    t = np.arange(n_samples) * (duration / n_samples)
    channels = {}
    for name, amp_deg in (
        ("roll", motion.roll_amp_deg),
        ("pitch", motion.pitch_amp_deg),
        ("yaw", motion.yaw_amp_deg),
    ):
        m = int(rng.integers(1, motion.max_components + 1))
        weights = rng.dirichlet(np.ones(m))
        periods = rng.uniform(motion.period_lo, motion.period_hi, m)
        phases = rng.uniform(0.0, 2.0 * math.pi, m)
        total = math.radians(amp_deg) * sea.hs
        series = np.zeros(n_samples)
        for w, per, ph in zip(weights, periods, phases):
            series += total * w * np.sin(2.0 * math.pi * t / per + ph)
        channels[name] = series
    return AttitudeSeries(times=t, **channels)


@dataclass
class TargetUnit:
    """One rigid group of scatterers rotating about a common pivot."""

    points: np.ndarray                 # (k, 3) body coordinates, m
    amplitudes: np.ndarray             # (k,) scattering amplitudes
    pivot: np.ndarray | None = None    # rotation centre; None = point centroid

    def __post_init__(self) -> None:
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        self.amplitudes = np.asarray(self.amplitudes, dtype=float)
        if self.points.shape[1] != 3:
            raise ValueError("points must be (k, 3)")
        if len(self.amplitudes) != len(self.points):
            raise ValueError("one amplitude per point required")
        if np.any(self.amplitudes <= 0.0):
            raise ValueError("amplitudes must be positive")
        if self.pivot is None:
            self.pivot = self.points.mean(axis=0)
        else:
            self.pivot = np.asarray(self.pivot, dtype=float).reshape(3)


@dataclass
class TargetModel:
    kind: str
    units: list[TargetUnit] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown target kind {self.kind!r}")
        if self.kind == SHIP and len(self.units) != 1:
            raise ValueError("a ship is a single rigid unit")
        if not self.units:
            raise ValueError("target has no units")
        if sum(len(u.points) for u in self.units) < 2:
            raise ValueError("target needs at least two body points")

    @property
    def body_points(self) -> np.ndarray:
        return np.vstack([u.points for u in self.units])

    @property
    def amplitudes(self) -> np.ndarray:
        return np.concatenate([u.amplitudes for u in self.units])


def default_ship() -> TargetModel:
    pts = np.array([[x, 0.0, 0.0] for x in SHIP_STATIONS])
    return TargetModel(SHIP, [TargetUnit(pts, np.ones(len(pts)))])


def default_reflector_array(
    spacing: float = 40.0, count: int = 4, pivot_depth: float = 5.0
) -> TargetModel:
    """Line of independently rocking reflectors.

    Each reflector is one scatterer pivoting about its mooring point
    ``pivot_depth`` below: the lever converts attitude motion into the
    radial velocity a wave-following floater actually shows.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    offsets = (np.arange(count) - (count - 1) / 2.0) * spacing
    units = [
        TargetUnit(
            np.array([[x, 0.0, 0.0]]),
            np.ones(1),
            pivot=np.array([x, 0.0, -pivot_depth]),
        )
        for x in offsets
    ]
    return TargetModel(REFLECTOR_ARRAY, units)


@dataclass(frozen=True)
class ScattererState:
    """Point-scatterer description handed to the echo synthesizer."""

    sigma: float  # scattering amplitude
    r: float      # LOS range at the CPI start, m
    v: float      # radial velocity (least-squares range rate), m/s

    def __post_init__(self) -> None:
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")
        if self.r <= 0.0:
            raise ValueError("range must be positive")
        if not (math.isfinite(self.r) and math.isfinite(self.v)):
            raise ValueError("scatterer state must be finite")


def _rotation_matrices(att: AttitudeSeries) -> np.ndarray:
    """Intrinsic Z-Y-X (yaw, then pitch, then roll) matrices, shape (n, 3, 3)."""
    cr, sr = np.cos(att.roll), np.sin(att.roll)
    cp, sp = np.cos(att.pitch), np.sin(att.pitch)
    cy, sy = np.cos(att.yaw), np.sin(att.yaw)
    n = len(att.times)
    rot = np.empty((n, 3, 3))
    rot[:, 0, 0] = cy * cp
    rot[:, 0, 1] = cy * sp * sr - sy * cr
    rot[:, 0, 2] = cy * sp * cr + sy * sr
    rot[:, 1, 0] = sy * cp
    rot[:, 1, 1] = sy * sp * sr + cy * cr
    rot[:, 1, 2] = sy * sp * cr - cy * sr
    rot[:, 2, 0] = -sp
    rot[:, 2, 1] = cp * sr
    rot[:, 2, 2] = cp * cr
    return rot


def project_scatterers(
    target: TargetModel,
    geom: ObservationGeometry,
    attitudes: list[AttitudeSeries],
    cpi: float,
) -> list[ScattererState]:
    """Project every body point onto the LOS over one CPI.

    Far-field ranges r(t) = r0 - u . w(t) are evaluated on the attitude
    time grid; the reported range is r(0) and the reported velocity is the
    least-squares slope of r(t), i.e. the per-CPI linearized range rate.
    """
    if len(attitudes) != len(target.units):
        raise ValueError("one attitude series per unit required")
    lengths = {len(a.times) for a in attitudes}
    if len(lengths) != 1:
        raise ValueError("attitude series lengths differ between units")
    n = lengths.pop()
    expected_t = np.arange(n) * (cpi / n)
    u = geom.los_unit()
    out: list[ScattererState] = []
    for unit, att in zip(target.units, attitudes):
        if not np.allclose(att.times, expected_t, atol=1e-12):
            raise ValueError("attitude time grid does not match the CPI")
        rot = _rotation_matrices(att)
        offsets = unit.points - unit.pivot                    # (k, 3)
        world = unit.pivot + np.einsum("nij,kj->nki", rot, offsets)
        ranges = geom.r0 - world @ u                          # (n, k)
        tc = expected_t - expected_t.mean()
        slope = tc @ (ranges - ranges.mean(axis=0)) / (tc @ tc)
        for j, sig in enumerate(unit.amplitudes):
            out.append(ScattererState(sigma=float(sig), r=float(ranges[0, j]), v=float(slope[j])))
    return out


def build_target(kind: str) -> TargetModel:
    """Default geometry for a target kind."""
    if kind == SHIP:
        return default_ship()
    if kind == REFLECTOR_ARRAY:
        return default_reflector_array()
    raise ValueError(f"unknown target kind {kind!r}")


def from_dict(cfg: dict) -> tuple[TargetModel, SeaState, ObservationGeometry]:
    """Build a scene from a parsed config mapping.

    Schema (JSON): ``{"target": {"kind": str, "body_points"?: [[x,y,z],..],
    "amplitudes"?: [..], "pivots"?: [[x,y,z],..]}, "sea": {"hs": float,
    "seed": int}, "geometry": {"r0": float, "theta_deg": float,
    "phi_deg": float}}``. When body_points are given, a ship forms one
    unit; a reflector array gets one unit per point.
    """
    tcfg = dict(cfg.get("target", {}))
    kind = tcfg.get("kind", SHIP)
    if "body_points" in tcfg:
        pts = np.asarray(tcfg["body_points"], dtype=float)
        amps = np.asarray(tcfg.get("amplitudes", np.ones(len(pts))), dtype=float)
        pivots = tcfg.get("pivots")
        if kind == SHIP:
            units = [TargetUnit(pts, amps, None if pivots is None else np.asarray(pivots[0]))]
        else:
            units = [
                TargetUnit(
                    pts[i : i + 1],
                    amps[i : i + 1],
                    None if pivots is None else np.asarray(pivots[i]),
                )
                for i in range(len(pts))
            ]
        target = TargetModel(kind, units)
    else:
        target = build_target(kind)
    sea_cfg = dict(cfg.get("sea", {}))
    sea = SeaState(hs=float(sea_cfg.get("hs", 1.0)), seed=int(sea_cfg.get("seed", 0)))
    gcfg = dict(cfg.get("geometry", {}))
    geom = ObservationGeometry(
        r0=float(gcfg.get("r0", 10_000.0)),
        theta_deg=float(gcfg.get("theta_deg", 45.0)),
        phi_deg=float(gcfg.get("phi_deg", 2.0)),
    )
    return target, sea, geom
