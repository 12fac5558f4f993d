"""Synthetic multipath channel generation.

A scene is a 2-D scatterer field plus transmitter / focal-spot geometry.
Every scatterer contributes one single-bounce propagation path
(TX -> scatterer -> RX) and, unless disabled, the direct TX -> RX path is
added as well.  Paths are treated as plane waves in the far field; a sampled
channel impulse response is produced by binning path contributions into
delay taps of width 1/bandwidth with a rectangular pulse shaper.

All functions are pure and deterministic for a fixed seed, so scenes and
responses can be synthesized in parallel without shared state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError

log = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class Mpc:
    """One propagation path in the far-field plane-wave approximation."""

    travel_distance: float  # total traveled distance, m
    arrival_angle: float  # direction of propagation at the RX, rad in [0, 2pi)
    gain: float  # non-negative amplitude
    reflection_phase: float  # rad in [0, 2pi)

    def __post_init__(self):
        if self.travel_distance <= 0.0:
            raise ParameterError("travel_distance must be positive")
        if self.gain < 0.0:
            raise ParameterError("gain must be non-negative")


@dataclass(frozen=True)
class Scene:
    """Scatterer field, geometry and radio parameters for synthesis.

    The focal spot is the origin of the scene's coordinate frame by
    convention of :func:`generate_scene`, but arbitrary geometry is allowed.
    """

    scatterers: np.ndarray  # (N, 2) positions, m
    reflection_coeffs: np.ndarray  # (N,) in (0, 1)
    tx_pos: np.ndarray  # (2,)
    rx_focal_pos: np.ndarray  # (2,)
    carrier_f0: float  # Hz
    bandwidth: float  # Hz
    pulse_shaper: str = "rectangular"
    tap_count: int = 0  # 0 means "derive from geometry"
    include_direct_path: bool = True

    def __post_init__(self):
        if self.bandwidth <= 0.0:
            raise ParameterError("bandwidth must be positive")
        if self.carrier_f0 <= self.bandwidth:
            raise ParameterError("carrier frequency must exceed bandwidth")
        if len(self.scatterers) == 0:
            raise ParameterError("scene needs at least one scatterer")
        coeffs = np.asarray(self.reflection_coeffs)
        if np.any(coeffs <= 0.0) or np.any(coeffs >= 1.0):
            raise ParameterError("reflection coefficients must lie in (0, 1)")
        if self.pulse_shaper != "rectangular":
            raise ParameterError(f"unsupported pulse shaper {self.pulse_shaper!r}")
        if self.tap_count == 0:
            object.__setattr__(self, "tap_count", self._default_tap_count())

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_f0

    @property
    def wavenumber(self) -> float:
        """Spatial frequency of the carrier, 2*pi*f0/c."""
        return 2.0 * np.pi * self.carrier_f0 / SPEED_OF_LIGHT

    @property
    def sample_spacing(self) -> float:
        """Distance resolution c/B: paths further apart occupy distinct taps."""
        return SPEED_OF_LIGHT / self.bandwidth

    def _default_tap_count(self, guard_taps: int = 4) -> int:
        legs_in = np.linalg.norm(self.scatterers - self.tx_pos, axis=1)
        legs_out = np.linalg.norm(self.scatterers - self.rx_focal_pos, axis=1)
        max_delay = float(np.max(legs_in + legs_out)) / SPEED_OF_LIGHT
        return int(np.ceil(max_delay * self.bandwidth)) + 1 + guard_taps

    def with_guard_taps(self, guard_taps: int) -> "Scene":
        """Copy of the scene with a wider tap budget (for long trajectories)."""
        return replace(self, tap_count=self._default_tap_count(guard_taps))


@dataclass(frozen=True)
class Cir:
    """A sampled channel impulse response."""

    taps: np.ndarray  # (L,) complex128
    timestamp: float  # s
    pose_label: np.ndarray | None = None  # (2,) ground-truth RX position, m

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.taps) ** 2))


def generate_scene(
    seed: int,
    n_scatterers: int,
    region_side: float,
    tx_rx_separation: float,
    carrier_f0: float,
    bandwidth: float,
    include_direct_path: bool = True,
    keepout_radius: float = 0.0,
) -> Scene:
    """Draw a random scatterer field around the focal spot.

    Scatterers are i.i.d. uniform in a square of side ``region_side``
    centered on the focal spot (the origin); reflection coefficients are
    i.i.d. uniform in (0, 1); the TX sits ``tx_rx_separation`` away on the
    negative x axis.  A positive ``keepout_radius`` rejects scatterers
    within that distance of the focal spot, keeping every path in the far
    field of a device moving near the origin.  Deterministic for a fixed
    seed.
    """
    if n_scatterers < 1:
        raise ParameterError("need at least one scatterer")
    if region_side <= 0.0 or tx_rx_separation <= 0.0:
        raise ParameterError("region side and TX separation must be positive")
    if not 0.0 <= keepout_radius < region_side / 2.0:
        raise ParameterError("keepout radius must lie in [0, region_side/2)")
    rng = np.random.default_rng(seed)
    scatterers = rng.uniform(-region_side / 2.0, region_side / 2.0, size=(n_scatterers, 2))
    while keepout_radius > 0.0:
        inside = np.linalg.norm(scatterers, axis=1) < keepout_radius
        if not np.any(inside):
            break
        scatterers[inside] = rng.uniform(-region_side / 2.0, region_side / 2.0,
                                         size=(int(inside.sum()), 2))
    coeffs = rng.uniform(0.0, 1.0, size=n_scatterers)
    # uniform(0,1) is open at both ends only almost surely; nudge exact endpoints
    coeffs = np.clip(coeffs, 1e-12, 1.0 - 1e-12)
    return Scene(
        scatterers=scatterers,
        reflection_coeffs=coeffs,
        tx_pos=np.array([-tx_rx_separation, 0.0]),
        rx_focal_pos=np.zeros(2),
        carrier_f0=float(carrier_f0),
        bandwidth=float(bandwidth),
        include_direct_path=include_direct_path,
    )


def _path_arrays(scene: Scene, rx_pos: np.ndarray):
    """Per-path (distance, arrival angle, gain, reflection phase) arrays.

    Amplitudes decay as 1/r over the total traveled distance; scattered
    paths are additionally weighted by their reflection coefficient and
    flipped in phase by the reflection.
    """
    rx = np.atleast_2d(np.asarray(rx_pos, dtype=np.float64))  # (M, 2)
    legs_in = np.linalg.norm(scene.scatterers - scene.tx_pos, axis=1)  # (N,)
    final = rx[:, None, :] - scene.scatterers[None, :, :]  # (M, N, 2)
    legs_out = np.linalg.norm(final, axis=2)  # (M, N)
    r = legs_in[None, :] + legs_out  # (M, N)
    theta = np.arctan2(final[..., 1], final[..., 0]) % (2.0 * np.pi)
    gain = scene.reflection_coeffs[None, :] / r
    phi = np.full_like(r, np.pi)
    if scene.include_direct_path:
        direct = rx - scene.tx_pos[None, :]  # (M, 2)
        r0 = np.linalg.norm(direct, axis=1)
        th0 = np.arctan2(direct[:, 1], direct[:, 0]) % (2.0 * np.pi)
        r = np.concatenate([r0[:, None], r], axis=1)
        theta = np.concatenate([th0[:, None], theta], axis=1)
        gain = np.concatenate([1.0 / r0[:, None], gain], axis=1)
        phi = np.concatenate([np.zeros((len(rx), 1)), phi], axis=1)
    return r, theta, gain, phi


def enumerate_mpcs(scene: Scene, rx_pos) -> list[Mpc]:
    """List every propagation path reaching ``rx_pos``.

    One single-bounce path per scatterer plus the direct path (when the
    scene includes it, listed first).
    """
    r, theta, gain, phi = _path_arrays(scene, np.asarray(rx_pos, dtype=np.float64))
    return [
        Mpc(float(r[0, i]), float(theta[0, i]), float(gain[0, i]), float(phi[0, i]))
        for i in range(r.shape[1])
    ]


def _bin_taps(scene: Scene, r, gain, phi):
    """Bin path contributions into delay taps; returns (taps (M, L), dropped)."""
    tau = r / SPEED_OF_LIGHT  # (M, P)
    period = 1.0 / scene.bandwidth
    l_idx = np.floor(tau / period + 0.5).astype(np.int64)  # bin [lT-T/2, lT+T/2)
    dtau = l_idx * period - tau
    amp = gain * np.exp(1j * (2.0 * np.pi * scene.carrier_f0 * dtau - phi))
    valid = (l_idx >= 0) & (l_idx < scene.tap_count)
    dropped = int(np.count_nonzero(~valid))
    m_idx = np.broadcast_to(np.arange(r.shape[0])[:, None], r.shape)
    taps = np.zeros((r.shape[0], scene.tap_count), dtype=np.complex128)
    np.add.at(taps, (m_idx[valid], l_idx[valid]), amp[valid])
    return taps, dropped


def synthesize_cir(scene: Scene, rx_pos, timestamp: float = 0.0, pose_label=None) -> Cir:
    """Sample the channel impulse response seen at ``rx_pos``.

    Paths whose delay falls in the same tap interval are summed as complex
    amplitudes; a path whose tap index exceeds the scene's tap budget is
    dropped with a counted warning.
    """
    rx = np.asarray(rx_pos, dtype=np.float64)
    r, _, gain, phi = _path_arrays(scene, rx)
    taps, dropped = _bin_taps(scene, r, gain, phi)
    if dropped:
        log.warning("%d path(s) fell outside the %d-tap budget and were dropped",
                    dropped, scene.tap_count)
    label = rx.copy() if pose_label is None else np.asarray(pose_label, dtype=np.float64)
    return Cir(taps=taps[0], timestamp=float(timestamp), pose_label=label)


def synthesize_cirs(scene: Scene, rx_positions, timestamps) -> list[Cir]:
    """Vectorized synthesis of one response per (position, timestamp) pair."""
    rx = np.atleast_2d(np.asarray(rx_positions, dtype=np.float64))
    ts = np.atleast_1d(np.asarray(timestamps, dtype=np.float64))
    if len(rx) != len(ts):
        raise ParameterError("positions and timestamps must have equal length")
    out = []
    dropped = 0
    chunk = max(1, 2_000_000 // max(len(scene.scatterers), 1))
    for lo in range(0, len(rx), chunk):
        part = rx[lo:lo + chunk]
        r, _, gain, phi = _path_arrays(scene, part)
        taps, n_drop = _bin_taps(scene, r, gain, phi)
        dropped += n_drop
        out.extend(Cir(taps=taps[m], timestamp=float(ts[lo + m]),
                       pose_label=part[m].copy())
                   for m in range(len(part)))
    if dropped:
        log.warning("%d path(s) fell outside the %d-tap budget and were dropped",
                    dropped, scene.tap_count)
    return out


def synthesize_trajectory(scene: Scene, waypoints, sample_period: float) -> list[Cir]:
    """Synthesize responses along a piecewise-linear trajectory.

    ``waypoints`` is a sequence of (position, time) pairs with strictly
    increasing times; the RX position is interpolated linearly in between
    and sampled every ``sample_period`` seconds starting at the first
    waypoint time.  Pose labels carry the true interpolated position.
    """
    if sample_period <= 0.0:
        raise ParameterError("sample_period must be positive")
    pts = np.asarray([np.asarray(p, dtype=np.float64) for p, _ in waypoints])
    times = np.asarray([float(t) for _, t in waypoints])
    if len(pts) == 0:
        raise ParameterError("need at least one waypoint")
    if np.any(np.diff(times) <= 0.0):
        raise ParameterError("waypoint timestamps must be strictly increasing")
    if len(pts) == 1:
        return [synthesize_cir(scene, pts[0], times[0])]
    ts = np.arange(times[0], times[-1] + sample_period / 2.0, sample_period)
    ts = ts[ts <= times[-1] + 1e-12]
    xs = np.interp(ts, times, pts[:, 0])
    ys = np.interp(ts, times, pts[:, 1])
    return synthesize_cirs(scene, np.column_stack([xs, ys]), ts)
