"""Floorplan geometry: wall segments, landmarks, intersection tests."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, ParameterError

LANDMARK_KINDS = ("corner", "door", "corridor_end")


@dataclass(frozen=True)
class Landmark:
    position: np.ndarray  # (2,)
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "position",
                           np.asarray(self.position, dtype=np.float64))
        if self.kind not in LANDMARK_KINDS:
            raise ParameterError(f"unknown landmark kind {self.kind!r}")


@dataclass(frozen=True)
class FloorPlan:
    walls: np.ndarray  # (M, 4) rows (x1, y1, x2, y2), m
    landmarks: list[Landmark]
    bounds: np.ndarray  # (4,) xmin, ymin, xmax, ymax

    def __post_init__(self):
        walls = np.asarray(self.walls, dtype=np.float64).reshape(-1, 4)
        object.__setattr__(self, "walls", walls)
        object.__setattr__(self, "bounds",
                           np.asarray(self.bounds, dtype=np.float64))
        if walls.size and np.any(
                np.hypot(walls[:, 2] - walls[:, 0], walls[:, 3] - walls[:, 1]) < 1e-9):
            raise ParameterError("degenerate wall segment")
        xmin, ymin, xmax, ymax = self.bounds
        for lm in self.landmarks:
            x, y = lm.position
            if not (xmin - 1e-9 <= x <= xmax + 1e-9 and ymin - 1e-9 <= y <= ymax + 1e-9):
                raise ParameterError("landmark outside floorplan bounds")

    @classmethod
    def empty(cls) -> "FloorPlan":
        return cls(walls=np.empty((0, 4)), landmarks=[],
                   bounds=np.array([-1e9, -1e9, 1e9, 1e9]))

    @classmethod
    def from_dict(cls, doc: dict) -> "FloorPlan":
        try:
            walls = np.asarray(doc.get("walls", []), dtype=np.float64).reshape(-1, 4)
            landmarks = [Landmark(np.array([lm["x"], lm["y"]]), lm["kind"])
                         for lm in doc.get("landmarks", [])]
            bounds = np.asarray(doc["bounds"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed floorplan document: {exc}") from exc
        return cls(walls=walls, landmarks=landmarks, bounds=bounds)

    def to_dict(self) -> dict:
        return {
            "walls": self.walls.tolist(),
            "landmarks": [{"x": float(lm.position[0]), "y": float(lm.position[1]),
                           "kind": lm.kind} for lm in self.landmarks],
            "bounds": self.bounds.tolist(),
        }

    @classmethod
    def load(cls, path) -> "FloorPlan":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise DataError(f"floorplan is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    def segment_hits_wall(self, p, q) -> bool:
        """True when the open segment p -> q crosses any wall."""
        if self.walls.size == 0:
            return False
        return bool(np.any(segments_intersect(
            np.asarray(p, dtype=np.float64), np.asarray(q, dtype=np.float64),
            self.walls[:, 0:2], self.walls[:, 2:4])))

    def nearest_landmark(self, point, kinds=("corner", "door")):
        """(landmark, distance) of the closest landmark of the given kinds."""
        best, best_d = None, np.inf
        p = np.asarray(point, dtype=np.float64)
        for lm in self.landmarks:
            if lm.kind not in kinds:
                continue
            d = float(np.linalg.norm(lm.position - p))
            if d < best_d:
                best, best_d = lm, d
        return best, best_d


def _orient(a, b, c):
    """Signed area of the triangle a, b, c (broadcasts over rows of c)."""
    return ((b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1])
            - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0]))


def segments_intersect(p1, p2, q1, q2):
    """Vectorized proper-or-touching intersection of segment p1p2 with q1q2.

    q1 / q2 may be (M, 2) arrays of segment endpoints; returns a bool array.
    """
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    proper = ((d1 > 0) != (d2 > 0)) & ((d3 > 0) != (d4 > 0)) \
        & (d1 != 0) & (d2 != 0) & (d3 != 0) & (d4 != 0)
    touch = (_on_segment(q1, q2, p1, d1) | _on_segment(q1, q2, p2, d2)
             | _on_segment(p1, p2, q1, d3) | _on_segment(p1, p2, q2, d4))
    return proper | touch


def _on_segment(a, b, c, cross):
    within = ((np.minimum(a[..., 0], b[..., 0]) - 1e-12 <= c[..., 0])
              & (c[..., 0] <= np.maximum(a[..., 0], b[..., 0]) + 1e-12)
              & (np.minimum(a[..., 1], b[..., 1]) - 1e-12 <= c[..., 1])
              & (c[..., 1] <= np.maximum(a[..., 1], b[..., 1]) + 1e-12))
    return (cross == 0) & within
