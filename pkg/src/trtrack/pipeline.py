"""End-to-end tracking: channel stream + IMU stream -> pose trace.

Distance increments come from the resonating-strength speed estimator at
the lag-window cadence; heading deltas come from gravity-projected
gyroscope integration, summed within each distance window; both feed the
hypothesis tracker with optional floorplan correction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import Cir
from .errors import ParameterError
from .floorplan import FloorPlan
from .heading import ImuSample, heading_series
from .motion import (CONFIDENCE_THRESHOLD, HOLD_TIME, _effective_speeds,
                     speed_series)
from .tracker import (TrackerConfig, TrackState, dead_reckon_step,
                      landmark_correct, make_track_state, prune_and_reweight)
from .trrs import trrs_sliding_matrix

GAP_FLAG_SECONDS = 1.0


@dataclass(frozen=True)
class TrackConfig:
    wavelength: float
    initial_pos: tuple = (0.0, 0.0)
    initial_heading: float = 0.0
    window: float = 0.16  # s, fusion cadence and TRRS max lag
    use_map: bool = True
    tracker: TrackerConfig = field(default_factory=TrackerConfig)


@dataclass(frozen=True)
class TrackResult:
    trace: list  # of (t, x, y, heading, cum_distance, dominant_scale)
    gaps: list  # of (stream_name, t_start, t_end) larger than the flag limit
    state: TrackState


def _stream_gaps(name: str, ts: np.ndarray) -> list:
    out = []
    for a, b in zip(ts, ts[1:]):
        if b - a > GAP_FLAG_SECONDS:
            out.append((name, float(a), float(b)))
    return out


def track(cirs: list[Cir], imu: list[ImuSample], plan: FloorPlan | None,
          config: TrackConfig) -> TrackResult:
    """Run the full tracking pipeline over time-overlapping streams."""
    if len(cirs) < 2 or len(imu) < 2:
        raise ParameterError("need at least two samples in each stream")
    cir_ts = np.asarray([c.timestamp for c in cirs])
    imu_ts = np.asarray([s.timestamp for s in imu])
    if cir_ts[-1] < imu_ts[0] or imu_ts[-1] < cir_ts[0]:
        raise ParameterError("channel and IMU streams do not overlap in time")
    gaps = _stream_gaps("cir", cir_ts) + _stream_gaps("imu", imu_ts)

    matrix = trrs_sliding_matrix(cirs, config.window)
    speeds = speed_series(matrix, config.wavelength)
    deltas = heading_series(imu)

    plan = plan if (config.use_map and plan is not None) else FloorPlan.empty()
    state = make_track_state(config.initial_pos, config.initial_heading,
                             config.tracker, timestamp=float(cir_ts[0]))

    speed_ts = np.asarray([s.timestamp for s in speeds])
    eff = (_effective_speeds(speeds, CONFIDENCE_THRESHOLD, HOLD_TIME)
           if speeds else np.empty(0))
    delta_ts = np.asarray([d.timestamp for d in deltas])
    delta_vals = np.asarray([d.delta_theta for d in deltas])

    trace = []
    t0 = float(cir_ts[0])
    edges = np.arange(t0, float(cir_ts[-1]) + config.window, config.window)
    for a, b in zip(edges, edges[1:]):
        d_inc = _window_distance(speed_ts, eff, a, b, t0)
        sel = (delta_ts > a) & (delta_ts <= b)
        d_theta = float(np.sum(delta_vals[sel]))
        dead_reckon_step(state, d_inc, d_theta, timestamp=float(b))
        prune_and_reweight(state, plan)
        landmark_correct(state, plan)
        dom = state.dominant
        (x, y), heading = dom.position, dom.headings[-1]
        trace.append((float(b), float(x), float(y), float(heading),
                      dom.scaled_dist, dom.scale))
    return TrackResult(trace=trace, gaps=gaps, state=state)


def _window_distance(speed_ts, eff, a, b, t_start) -> float:
    """Trapezoidal distance within window (a, b], holding edge speeds flat."""
    if len(speed_ts) == 0:
        return 0.0
    # speed as a piecewise-linear function of time, flat before the first
    # and after the last estimate (first estimates only appear once the lag
    # window has filled, so the hold covers the stream head)
    grid = [a]
    inside = speed_ts[(speed_ts > a) & (speed_ts < b)]
    grid.extend(float(t) for t in inside)
    grid.append(b)
    v = np.interp(grid, speed_ts, eff)
    return float(np.trapezoid(v, grid))
