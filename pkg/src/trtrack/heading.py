"""Heading change from inertial measurements.

The change of moving direction in the horizontal plane is the projection of
the device-frame angular velocity onto the gravity axis, scaled by the time
step.  Gravity direction comes from a short low-pass mean of the
accelerometer; when the device lies flat this reduces to plain gyroscope-z
integration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, ParameterError

GRAVITY_WINDOW = 0.5  # s of accelerometer history averaged per estimate


@dataclass(frozen=True)
class ImuSample:
    timestamp: float
    angular_velocity: np.ndarray  # (3,) rad/s, device frame
    acceleration: np.ndarray  # (3,) m/s^2, device frame

    def __post_init__(self):
        object.__setattr__(self, "angular_velocity",
                           np.asarray(self.angular_velocity, dtype=np.float64))
        object.__setattr__(self, "acceleration",
                           np.asarray(self.acceleration, dtype=np.float64))
        if not (np.all(np.isfinite(self.angular_velocity))
                and np.all(np.isfinite(self.acceleration))):
            raise ParameterError("IMU sample components must be finite")


@dataclass(frozen=True)
class HeadingDelta:
    timestamp: float
    delta_theta: float  # rad


def gravity_estimate(samples: list[ImuSample]) -> np.ndarray:
    """Unit gravity direction from the mean accelerometer vector."""
    if not samples:
        raise ParameterError("gravity window must be non-empty")
    mean = np.mean([s.acceleration for s in samples], axis=0)
    norm = np.linalg.norm(mean)
    if norm < 1e-6:
        raise DegenerateInputError("near-zero mean acceleration; cannot "
                                   "estimate gravity direction")
    return mean / norm


def heading_delta(sample: ImuSample, gravity: np.ndarray, dt: float) -> HeadingDelta:
    """Horizontal-plane heading change over one interval.

    delta_theta = (omega . g_hat) * dt; ``gravity`` must be unit norm.
    """
    if dt <= 0.0:
        raise ParameterError("dt must be positive")
    g = np.asarray(gravity, dtype=np.float64)
    if abs(np.linalg.norm(g) - 1.0) > 1e-6:
        raise ParameterError("gravity must be a unit vector")
    return HeadingDelta(timestamp=sample.timestamp,
                        delta_theta=float(np.dot(sample.angular_velocity, g) * dt))


def wrap_angle(theta: float) -> float:
    """Wrap to [-pi, pi)."""
    return float((theta + np.pi) % (2.0 * np.pi) - np.pi)


def accumulate_heading(initial_theta: float,
                       deltas: list[HeadingDelta]) -> list[tuple]:
    """Running heading, wrapped to [-pi, pi); first entry is the initial."""
    ts = [d.timestamp for d in deltas]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ParameterError("heading deltas must be time-ordered")
    out = [(ts[0] if ts else 0.0, wrap_angle(initial_theta))]
    theta = initial_theta
    for d in deltas:
        theta += d.delta_theta
        out.append((d.timestamp, wrap_angle(theta)))
    return out


def heading_series(samples: list[ImuSample],
                   gravity_window: float = GRAVITY_WINDOW) -> list[HeadingDelta]:
    """Per-interval heading deltas for a whole IMU stream.

    Gravity is re-estimated from a trailing window at each step and the
    previous sample's angular velocity is applied over the interval.
    """
    if len(samples) < 2:
        return []
    ts = np.asarray([s.timestamp for s in samples])
    if np.any(np.diff(ts) <= 0.0):
        raise ParameterError("IMU timestamps must be strictly increasing")
    out = []
    lo = 0
    for i in range(1, len(samples)):
        prev = samples[i - 1]
        while ts[lo] < prev.timestamp - gravity_window:
            lo += 1
        g = gravity_estimate(samples[lo:i])
        dt = float(ts[i] - ts[i - 1])
        d = heading_delta(prev, g, dt)
        out.append(HeadingDelta(timestamp=float(ts[i]), delta_theta=d.delta_theta))
    return out
