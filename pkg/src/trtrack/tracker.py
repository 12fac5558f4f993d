"""Floorplan-constrained dead reckoning.

Position is advanced incrementally: each step turns the heading by the
measured heading change, then moves by the measured distance increment.
Because both distance and heading carry slowly varying errors, the tracker
keeps a small grid of path hypotheses (distance scale x heading bias),
kills any hypothesis that walks through a wall, and re-anchors scale and
position whenever a detected turn lines up with a mapped corner or door
landmark.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError
from .floorplan import FloorPlan
from .heading import wrap_angle

DEFAULT_SCALE_GRID = (0.8, 1.0, 1.2)
DEFAULT_BIAS_GRID = (-np.deg2rad(5.0), 0.0, np.deg2rad(5.0))
RECOVERY_SCALE_GRID = (0.7, 0.85, 1.0, 1.15, 1.3)
RECOVERY_BIAS_GRID = (-np.deg2rad(10.0), 0.0, np.deg2rad(10.0))


@dataclass(frozen=True)
class TrackerConfig:
    scale_grid: tuple = DEFAULT_SCALE_GRID
    bias_grid: tuple = DEFAULT_BIAS_GRID
    scale_bounds: tuple = (0.7, 1.3)
    capture_radius: float = 2.0  # m; landmark snap range
    turn_angle: float = np.deg2rad(60.0)  # rad within turn_window to count as a turn
    turn_window: float = 1.0  # s
    snap_cooldown: float = 2.0  # s between snaps of one hypothesis
    align_heading_on_snap: bool = True


@dataclass
class PathHypothesis:
    """One dead-reckoning path under a fixed scale / heading-bias guess."""

    scale: float
    heading_bias: float  # rad, added to the accumulated heading
    weight: float
    heading: float  # accumulated (unwrapped) heading, bias excluded
    times: list = field(default_factory=list)
    xs: list = field(default_factory=list)
    ys: list = field(default_factory=list)
    headings: list = field(default_factory=list)  # unwrapped effective heading
    raw_dists: list = field(default_factory=list)  # cumulative raw input distance
    scaled_dist: float = 0.0
    anchor_pos: np.ndarray = field(default_factory=lambda: np.zeros(2))
    anchor_raw_dist: float = 0.0
    last_snap_time: float = -np.inf

    @property
    def position(self) -> np.ndarray:
        return np.array([self.xs[-1], self.ys[-1]])

    def trace(self) -> list[tuple]:
        return [(t, x, y, wrap_angle(h))
                for t, x, y, h in zip(self.times, self.xs, self.ys, self.headings)]


@dataclass
class TrackState:
    hypotheses: list[PathHypothesis]
    config: TrackerConfig
    time: float = 0.0

    @property
    def dominant(self) -> PathHypothesis:
        return max(self.hypotheses, key=lambda h: h.weight)

    @property
    def current_pose(self) -> tuple:
        h = self.dominant
        return h.position, wrap_angle(h.headings[-1])

    @property
    def cumulative_distance(self) -> float:
        return self.dominant.scaled_dist


def make_track_state(initial_pos, initial_heading: float,
                     config: TrackerConfig | None = None,
                     timestamp: float = 0.0) -> TrackState:
    """Fresh hypothesis grid centered on the starting pose."""
    cfg = config or TrackerConfig()
    pos = np.asarray(initial_pos, dtype=np.float64)
    hyps = []
    for s in cfg.scale_grid:
        for b in cfg.bias_grid:
            hyps.append(PathHypothesis(
                scale=float(s), heading_bias=float(b),
                weight=_neutral_weight(s, b),
                heading=float(initial_heading),
                times=[timestamp], xs=[float(pos[0])], ys=[float(pos[1])],
                headings=[float(initial_heading + b)], raw_dists=[0.0],
                anchor_pos=pos.copy()))
    _normalize(hyps)
    return TrackState(hypotheses=hyps, config=cfg, time=timestamp)


def _neutral_weight(scale: float, bias: float) -> float:
    # weights favor the unperturbed hypothesis so that, absent any wall
    # evidence, the dominant path is the raw dead-reckoned one
    return 1.0 / (1.0 + abs(scale - 1.0) + abs(bias))


def _normalize(hyps) -> None:
    total = sum(h.weight for h in hyps)
    for h in hyps:
        h.weight /= total


def dead_reckon_step(state: TrackState, d_increment: float, delta_theta: float,
                     timestamp: float | None = None) -> TrackState:
    """Advance every hypothesis by one increment (turn first, then move)."""
    if d_increment < 0.0:
        raise ParameterError("distance increment must be non-negative")
    t = state.time + 1.0 if timestamp is None else float(timestamp)
    for h in state.hypotheses:
        h.heading += delta_theta
        direction = h.heading + h.heading_bias
        step = h.scale * d_increment
        h.times.append(t)
        h.xs.append(h.xs[-1] + step * np.cos(direction))
        h.ys.append(h.ys[-1] + step * np.sin(direction))
        h.headings.append(direction)
        h.raw_dists.append(h.raw_dists[-1] + d_increment)
        h.scaled_dist += step
    state.time = t
    return state


def prune_and_reweight(state: TrackState, plan: FloorPlan) -> TrackState:
    """Zero out hypotheses whose last step crossed a wall; renormalize.

    When every hypothesis dies the set is regenerated in place around the
    previous (pre-step) poses with a widened scale / bias spread.
    """
    alive = 0.0
    for h in state.hypotheses:
        if h.weight <= 0.0 or len(h.xs) < 2:
            continue
        p = np.array([h.xs[-2], h.ys[-2]])
        q = np.array([h.xs[-1], h.ys[-1]])
        if plan.segment_hits_wall(p, q):
            h.weight = 0.0
        alive += h.weight
    if alive > 0.0:
        _normalize(state.hypotheses)
        return state
    return _recover(state)


def _recover(state: TrackState) -> TrackState:
    # Total hypothesis loss: roll the offending step back and respawn a
    # wider grid from the surviving pose of the previously dominant path.
    base = state.dominant if any(h.weight for h in state.hypotheses) \
        else state.hypotheses[0]
    for h in state.hypotheses:
        if len(h.xs) >= 2:
            h.xs[-1], h.ys[-1] = h.xs[-2], h.ys[-2]
    hyps = []
    for s in RECOVERY_SCALE_GRID:
        for b in RECOVERY_BIAS_GRID:
            h = PathHypothesis(
                scale=float(s), heading_bias=float(b),
                weight=_neutral_weight(s, b),
                heading=base.heading,
                times=list(base.times), xs=list(base.xs), ys=list(base.ys),
                headings=list(base.headings), raw_dists=list(base.raw_dists),
                scaled_dist=base.scaled_dist,
                anchor_pos=base.position.copy(),
                anchor_raw_dist=base.raw_dists[-1],
                last_snap_time=base.last_snap_time)
            hyps.append(h)
    _normalize(hyps)
    state.hypotheses = hyps
    return state


#: A turn only counts once the heading has stopped swinging: the change over
#: this trailing settle time must stay below SETTLE_ANGLE.
TURN_SETTLE_TIME = 0.3
TURN_SETTLE_ANGLE = np.deg2rad(8.0)


def _detect_turn(h: PathHypothesis, window: float, angle: float):
    """(turn index, total turn) when the trailing window contains a turn.

    Reports nothing while the heading is still mid-swing, so corrections
    never fire in the middle of a corner.
    """
    t_now = h.times[-1]
    i_s = len(h.times) - 1
    while i_s > 0 and h.times[i_s - 1] >= t_now - TURN_SETTLE_TIME:
        i_s -= 1
    if abs(h.headings[-1] - h.headings[i_s]) > TURN_SETTLE_ANGLE:
        return None
    i0 = len(h.times) - 1
    while i0 > 0 and h.times[i0 - 1] >= t_now - window:
        i0 -= 1
    total = h.headings[-1] - h.headings[i0]
    if abs(total) < angle:
        return None
    # turn point: where the heading crosses the midpoint of the swing
    mid = h.headings[i0] + 0.5 * total
    for i in range(i0, len(h.times)):
        if (h.headings[i] - mid) * np.sign(total) >= 0.0:
            return i, total
    return len(h.times) - 1, total


def _corridor_direction(plan: FloorPlan, landmark_pos, direction: float,
                        radius: float = 4.0, tol: float = np.deg2rad(25.0)):
    """Wall-axis direction nearest to ``direction`` around a landmark."""
    best, best_err = None, tol
    for x1, y1, x2, y2 in plan.walls:
        seg = np.array([x2 - x1, y2 - y1])
        mid_d = _point_segment_distance(landmark_pos, (x1, y1), (x2, y2))
        if mid_d > radius:
            continue
        axis = np.arctan2(seg[1], seg[0])
        for cand in (axis, axis + np.pi):
            err = abs(wrap_angle(direction - cand))
            if err < best_err:
                best, best_err = cand, err
    return best


def _point_segment_distance(p, a, b) -> float:
    p = np.asarray(p, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ab = b - a
    t = np.clip(np.dot(p - a, ab) / np.dot(ab, ab), 0.0, 1.0)
    return float(np.linalg.norm(p - (a + t * ab)))


def landmark_correct(state: TrackState, plan: FloorPlan) -> TrackState:
    """Snap recent turns onto nearby corner/door landmarks.

    On a snap the hypothesis is translated so its turn point coincides with
    the landmark (never by more than the capture radius), its distance scale
    is re-estimated from the map distance between consecutive anchors, and
    the error accumulated before the landmark is forgotten.
    """
    cfg = state.config
    for h in state.hypotheses:
        if h.weight <= 0.0 or len(h.times) < 3:
            continue
        if h.times[-1] - h.last_snap_time < cfg.snap_cooldown:
            continue
        turn = _detect_turn(h, cfg.turn_window, cfg.turn_angle)
        if turn is None:
            continue
        idx, _ = turn
        turn_pos = np.array([h.xs[idx], h.ys[idx]])
        lm, dist = plan.nearest_landmark(turn_pos)
        if lm is None or dist > cfg.capture_radius:
            continue
        shift = lm.position - turn_pos
        for i in range(idx, len(h.xs)):
            h.xs[i] += shift[0]
            h.ys[i] += shift[1]
        d_map = float(np.linalg.norm(lm.position - h.anchor_pos))
        d_raw = h.raw_dists[idx] - h.anchor_raw_dist
        if d_raw > 1.0 and d_map > 1.0:
            lo, hi = cfg.scale_bounds
            h.scale = float(np.clip(d_map / d_raw, lo, hi))
        if cfg.align_heading_on_snap:
            direction = h.headings[-1]
            cand = _corridor_direction(plan, lm.position, direction)
            if cand is not None:
                # keep the unwrapped branch continuous
                adjust = wrap_angle(cand - direction)
                h.heading += adjust
                h.headings[-1] += adjust
        h.anchor_pos = lm.position.copy()
        h.anchor_raw_dist = h.raw_dists[idx]
        h.last_snap_time = h.times[-1]
    return state
