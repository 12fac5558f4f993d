"""Resonating strength between channel impulse responses.

The time-reversal resonating strength (TRRS) between two responses is the
normalized zero-lag energy of the received signal when one response is used
as the time-reversed probe for the other:

    eta(h1, h2) = |sum_l h1(l) h2*(l)|^2 / (sum |h1|^2 * sum |h2|^2)

It equals 1 for identical channels, is symmetric, scale invariant and lies
in [0, 1].  Around a focal spot in a rich-scattering field the expected
decay with displacement d follows J0^2(k d) with k the carrier wavenumber.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .bessel import j0
from .channel import Cir
from .errors import DegenerateInputError, ParameterError

log = logging.getLogger(__name__)

_CLAMP_SLACK = 1e-12


def trrs(h1: Cir, h2: Cir) -> float:
    """Resonating strength between two responses, in [0, 1]."""
    if len(h1.taps) != len(h2.taps):
        raise ParameterError(
            f"tap counts differ: {len(h1.taps)} vs {len(h2.taps)}")
    e1 = h1.energy
    e2 = h2.energy
    if e1 <= 0.0 or e2 <= 0.0:
        raise DegenerateInputError("zero-energy channel response")
    value = float(np.abs(np.vdot(h2.taps, h1.taps)) ** 2 / (e1 * e2))
    if value > 1.0:
        if value > 1.0 + _CLAMP_SLACK:
            log.warning("TRRS %.17g exceeds 1 beyond tolerance; clamping", value)
        value = 1.0
    return value


def bessel_reference(d, wavelength: float):
    """Theoretical decay J0^2(2*pi*d/wavelength) of TRRS with distance."""
    d = np.asarray(d, dtype=np.float64)
    if np.any(d < 0.0):
        raise ParameterError("distance must be non-negative")
    if wavelength <= 0.0:
        raise ParameterError("wavelength must be positive")
    out = j0(2.0 * np.pi * d / wavelength) ** 2
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class TrrsSeries:
    """TRRS of a stream of responses against one fixed reference."""

    reference_timestamp: float
    timestamps: np.ndarray  # (M,) strictly increasing
    values: np.ndarray  # (M,) in [0, 1]

    def __len__(self):
        return len(self.timestamps)


def trrs_series(reference: Cir, stream: list[Cir]) -> TrrsSeries:
    """One TRRS entry per stream response against the fixed reference."""
    ts = np.asarray([c.timestamp for c in stream])
    if len(ts) > 1 and np.any(np.diff(ts) <= 0.0):
        raise ParameterError("stream timestamps must be strictly increasing")
    vals = np.asarray([trrs(reference, c) for c in stream])
    return TrrsSeries(reference_timestamp=reference.timestamp,
                      timestamps=ts, values=vals)


@dataclass(frozen=True)
class TrrsMatrix:
    """Sliding-lag TRRS of a stream against its own recent past.

    ``values[k, m]`` holds trrs(cir(t_m - lags[k]), cir(t_m)); entries with
    no measurement at the lagged instant (packet loss, stream head) are NaN,
    never zero, so downstream peak fitting can skip them.
    """

    times: np.ndarray  # (M,)
    lags: np.ndarray  # (K,) positive, ascending multiples of the base period
    values: np.ndarray  # (K, M) float64, NaN where absent

    @property
    def sample_period(self) -> float:
        return float(self.lags[0])

    def column(self, m: int):
        """(lags, values) profile for column ``m``."""
        return self.lags, self.values[:, m]


def _base_period(ts: np.ndarray) -> float:
    diffs = np.diff(ts)
    if np.any(diffs <= 0.0):
        raise ParameterError("stream must be sorted by strictly increasing time")
    return float(np.min(diffs))


def trrs_sliding_matrix(stream: list[Cir], max_lag: float) -> TrrsMatrix:
    """TRRS between each response and every earlier one within ``max_lag``.

    The lag axis is the regular grid implied by the smallest timestamp step
    in the stream; dropped measurements simply leave NaN holes.
    """
    if max_lag <= 0.0:
        raise ParameterError("max_lag must be positive")
    ts = np.asarray([c.timestamp for c in stream])
    if len(ts) < 2:
        return TrrsMatrix(times=ts, lags=np.empty(0),
                          values=np.empty((0, len(ts))))
    period = _base_period(ts)
    n_lags = int(np.floor(max_lag / period + 1e-9))
    lags = period * np.arange(1, n_lags + 1)
    # Map each response onto the regular grid to locate its lag partners.
    grid = np.round((ts - ts[0]) / period).astype(np.int64)
    taps = np.asarray([c.taps for c in stream])
    energy = np.sum(np.abs(taps) ** 2, axis=1)
    if np.any(energy <= 0.0):
        raise DegenerateInputError("zero-energy channel response in stream")
    conj = np.conjugate(taps)
    values = np.full((n_lags, len(ts)), np.nan)
    for k in range(1, n_lags + 1):
        pos = np.searchsorted(grid, grid - k)
        pos = np.clip(pos, 0, len(grid) - 1)
        ok = grid[pos] == grid - k
        m_idx = np.nonzero(ok)[0]
        j_idx = pos[m_idx]
        num = np.abs(np.einsum("ml,ml->m", taps[m_idx], conj[j_idx])) ** 2
        values[k - 1, m_idx] = np.minimum(
            num / (energy[m_idx] * energy[j_idx]), 1.0)
    return TrrsMatrix(times=ts, lags=lags, values=values)


def temporal_focusing_profile(h1: Cir, h2: Cir) -> np.ndarray:
    """Normalized received energy |s(k)|^2 across all time-reversal lags.

    Diagnostic view of the temporal focusing peak; index L-1 is lag zero and
    the value there equals trrs(h1, h2).
    """
    if len(h1.taps) != len(h2.taps):
        raise ParameterError("tap counts must match")
    e1, e2 = h1.energy, h2.energy
    if e1 <= 0.0 or e2 <= 0.0:
        raise DegenerateInputError("zero-energy channel response")
    corr = np.correlate(h1.taps, h2.taps, mode="full")  # sum h1(l) h2*(l-k)
    return np.abs(corr) ** 2 / (e1 * e2)
