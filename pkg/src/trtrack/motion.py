"""Speed and moving-distance estimation from resonating-strength lag profiles.

A device moving at speed v samples the J0^2(k d) spatial decay in time, so
the first local peak of the TRRS-vs-lag profile sits at t_peak = 0.61
wavelengths / v.  The estimator locates that peak, refines it with a
quadratic vertex fit, converts it to speed and integrates speed over time
into moving distance.  Missing profile entries (packet loss) are skipped,
never imputed as zeros.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bessel import SECOND_LOBE_RATIO, SPEED_RULER_WAVELENGTHS
from .errors import ParameterError
from .trrs import TrrsMatrix

#: An entry counts as a local peak only if it rises above the preceding
#: valley by this much TRRS.
PROMINENCE_THRESHOLD = 0.05

#: Candidate-sample window for the quadratic vertex fit.
FIT_WINDOW = 5

#: Speed estimates with confidence below this are not trusted directly.
CONFIDENCE_THRESHOLD = 0.1

#: How long a stale reliable speed is held before decaying to zero.
HOLD_TIME = 0.5


@dataclass(frozen=True)
class SpeedEstimate:
    timestamp: float
    speed: float  # m/s, >= 0
    peak_lag: float  # s; 0 when no peak was found
    confidence: float  # in [0, 1]


@dataclass(frozen=True)
class DistanceTrack:
    """Cumulative moving distance with its per-interval breakdown."""

    cumulative_distance: float
    increments: list  # of (t_start, t_end, d_increment)


def _quadratic_vertex(x: np.ndarray, y: np.ndarray) -> float | None:
    """Abscissa of the extremum of a least-squares parabola, or None."""
    if len(x) < 3:
        return None
    if len(x) == 3:
        # closed form for the interpolating parabola (Newton differences)
        d1 = (y[1] - y[0]) / (x[1] - x[0])
        d2 = (y[2] - y[1]) / (x[2] - x[1])
        a = (d2 - d1) / (x[2] - x[0])
        if a >= 0.0:
            return None
        return float(0.5 * (x[0] + x[1]) - d1 / (2.0 * a))
    coeffs = np.polyfit(x, y, 2)
    if coeffs[0] >= 0.0:
        return None
    return float(-coeffs[1] / (2.0 * coeffs[0]))


#: A candidate peak is demoted to the lobe below it when that lobe shows a
#: local maximum clearing this much TRRS above the dip between them.
DOWNSHIFT_PROMINENCE = 0.015


def _downshift_lobe(lags, vals, peak_idx, valley):
    """Move a detected peak down a lobe while a weaker earlier peak exists.

    The decay pattern's local maxima are spaced by a fixed lag ratio, so a
    lock on lobe n+1 implies a (possibly suppressed) lobe-n maximum near
    lag/ratio.  If the search window there holds an interior local maximum
    separated from the current peak by a dip, that earlier maximum is the
    true first peak.
    """
    while True:
        center = lags[peak_idx] / SECOND_LOBE_RATIO
        win = np.flatnonzero((lags >= 0.8 * center) & (lags <= 1.25 * center))
        win = win[win < peak_idx]
        if len(win) == 0:
            return peak_idx, valley
        j = win[np.argmax(vals[win])]
        is_local_max = (0 < j < len(vals) - 1
                        and vals[j] >= vals[j - 1] and vals[j] >= vals[j + 1])
        dip = float(np.min(vals[j:peak_idx + 1]))
        if not is_local_max or vals[j] - dip < DOWNSHIFT_PROMINENCE:
            return peak_idx, valley
        peak_idx = j
        valley = min(valley, float(np.min(vals[:j])) if j > 0 else valley)


def find_first_peak(lag_profile, prominence: float = PROMINENCE_THRESHOLD,
                    window: int = FIT_WINDOW):
    """Locate the first local maximum after the initial decay from lag -> 0.

    ``lag_profile`` is a sequence of (lag, trrs) pairs with increasing lags;
    absent entries may be encoded as NaN values and are skipped.  Returns
    (peak_lag, confidence) or None when no peak qualifies (stationary device
    or too short a profile).

    The discrete peak is refined by a quadratic vertex through the three
    centered samples when both grid neighbors are present, falling back to a
    least-squares parabola over up to ``window`` lobe samples otherwise.
    """
    pairs = [(float(l), float(v)) for l, v in lag_profile]
    lags = np.asarray([p[0] for p in pairs])
    vals = np.asarray([p[1] for p in pairs])
    return _first_peak_arrays(lags, vals, prominence, window)


def _first_peak_arrays(lags: np.ndarray, vals: np.ndarray, prominence: float,
                       window: int):
    finite = np.isfinite(vals)
    if not finite.all():
        lags, vals = lags[finite], vals[finite]
    if len(vals) < 5:
        return None
    if np.any(np.diff(lags) <= 0.0):
        raise ParameterError("lags must be increasing")

    # Walk the profile: track the running valley after the initial decay and
    # fire on the first sample that beats both neighbors and clears the
    # valley by the prominence threshold.
    valley = vals[0]
    peak_idx = None
    for i in range(1, len(vals) - 1):
        valley = min(valley, vals[i])
        if (vals[i] > vals[i - 1] and vals[i] >= vals[i + 1]
                and vals[i] - valley >= prominence):
            peak_idx = i
            break
    if peak_idx is None:
        return None
    peak_idx, valley = _downshift_lobe(lags, vals, peak_idx, valley)

    # Restrict fitting samples to the peak's own lobe: between the adjacent
    # local minima, so the near-null tails cannot skew the parabola.
    lo = peak_idx
    while lo > 0 and vals[lo - 1] < vals[lo]:
        lo -= 1
    hi = peak_idx
    while hi < len(vals) - 1 and vals[hi + 1] < vals[hi]:
        hi += 1
    half = window // 2
    grid_step = np.min(np.diff(lags))
    neighbors_on_grid = (
        peak_idx - 1 >= lo and peak_idx + 1 <= hi
        and abs(lags[peak_idx] - lags[peak_idx - 1] - grid_step) < 1e-9
        and abs(lags[peak_idx + 1] - lags[peak_idx] - grid_step) < 1e-9)
    if neighbors_on_grid:
        vertex = _quadratic_vertex(lags[peak_idx - 1:peak_idx + 2],
                                   vals[peak_idx - 1:peak_idx + 2])
    else:
        # grid neighbors are missing: fit over the lobe samples within the
        # W-sample physical window (half*grid on each side), where the lobe
        # is still parabola-like
        near = np.flatnonzero(
            np.abs(lags - lags[peak_idx]) <= (half + 0.5) * grid_step)
        near = near[(near >= lo) & (near <= hi)]
        vertex = (_quadratic_vertex(lags[near], vals[near])
                  if len(near) >= 3 else None)
    if vertex is None:
        vertex = lags[peak_idx]
    # a dropped true-peak sample can shift the discrete lock by one step,
    # never more
    vertex = float(np.clip(vertex, lags[peak_idx] - grid_step,
                           lags[peak_idx] + grid_step))

    prominence_val = vals[peak_idx] - valley
    confidence = float(np.clip(prominence_val / max(1.0 - valley, 1e-12), 0.0, 1.0))
    return vertex, confidence


def estimate_speed(lags, values, wavelength: float, timestamp: float = 0.0,
                   prominence: float = PROMINENCE_THRESHOLD) -> SpeedEstimate:
    """Speed from one lag profile: v = 0.61 * wavelength / t_peak."""
    if wavelength <= 0.0:
        raise ParameterError("wavelength must be positive")
    peak = _first_peak_arrays(np.asarray(lags, dtype=np.float64),
                              np.asarray(values, dtype=np.float64),
                              prominence, FIT_WINDOW)
    if peak is None:
        return SpeedEstimate(timestamp=timestamp, speed=0.0, peak_lag=0.0,
                             confidence=0.0)
    peak_lag, confidence = peak
    speed = SPEED_RULER_WAVELENGTHS * wavelength / peak_lag
    return SpeedEstimate(timestamp=timestamp, speed=speed, peak_lag=peak_lag,
                         confidence=confidence)


#: Columns averaged into each lag profile before peak fitting.  The speed
#: is taken as constant over the lag window anyway, so averaging profiles
#: over a comparable time span only removes scatterer-realization noise.
SMOOTH_COLUMNS = 151

#: Running-median window (columns) applied to the speed series to reject
#: isolated wrong-lobe peak locks.
MEDIAN_WINDOW = 81

#: Time span (s) of the neighborhood used as speed context when repairing
#: weak or outlier estimates.  Wide enough that a multi-second cluster of
#: wrong-lobe locks cannot dominate its own context.
CONTEXT_SPAN = 2.5

#: A reliable estimate further than this fraction from the local context
#: median is treated as a wrong-lobe lock and re-searched.
OUTLIER_FRACTION = 0.2

#: A repaired column must show at least this much relative prominence in
#: its search window; a flat window means the lobe is genuinely absent.
MIN_REPAIR_PROMINENCE = 0.01

#: Lag search window around the context-expected peak, as fractions of the
#: expected lag.  The upper bound stays below the second-lobe peak, which
#: sits at ~1.44x the first-peak lag.
CONTEXT_LAG_WINDOW = (0.72, 1.38)


def _smooth_profiles(values: np.ndarray, window: int) -> np.ndarray:
    if window <= 1:
        return values
    half = window // 2
    out = np.full_like(values, np.nan)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=RuntimeWarning)
        for c in range(values.shape[1]):
            out[:, c] = np.nanmean(values[:, max(0, c - half):c + half + 1],
                                   axis=1)
    return out


def _median_filter(speeds: list[SpeedEstimate], window: int) -> list[SpeedEstimate]:
    """Replace each reliable speed by the median of reliable neighbors."""
    if window <= 1 or not speeds:
        return speeds
    half = window // 2
    vals = np.asarray([s.speed for s in speeds])
    conf = np.asarray([s.confidence for s in speeds])
    out = []
    for i, s in enumerate(speeds):
        sel = slice(max(0, i - half), i + half + 1)
        good = conf[sel] >= CONFIDENCE_THRESHOLD
        if s.confidence >= CONFIDENCE_THRESHOLD and np.any(good):
            med = float(np.median(vals[sel][good]))
            out.append(SpeedEstimate(s.timestamp, med, s.peak_lag, s.confidence))
        else:
            out.append(s)
    return out


def _context_repair(speeds: list[SpeedEstimate], smoothed: np.ndarray,
                    matrix: TrrsMatrix, wavelength: float,
                    primary: np.ndarray) -> list[SpeedEstimate]:
    """Second pass: re-search weak and outlier columns near the local speed.

    A peak below the confidence threshold, or a confident peak far from the
    median of its reliable neighbors (a wrong-lobe lock), is re-estimated by
    searching only the lag window where the first peak must sit given the
    neighborhood's speed.  ``primary`` marks estimates that were confident
    before any repair; those anchor the context whenever available, so a
    cluster of repaired columns can never out-vote the original evidence.
    Columns with no reliable context are left alone.
    """
    t = np.asarray([s.timestamp for s in speeds])
    v = np.asarray([s.speed for s in speeds])
    conf = np.asarray([s.confidence for s in speeds])
    reliable = conf >= CONFIDENCE_THRESHOLD
    outlier = np.zeros(len(speeds), dtype=bool)
    for i in np.flatnonzero(reliable):
        sel = reliable & (np.abs(t - t[i]) <= CONTEXT_SPAN)
        anchor = sel & primary
        ctx = float(np.median(v[anchor if np.count_nonzero(anchor) >= 5
                                else sel]))
        if ctx > 0.0 and abs(v[i] - ctx) > OUTLIER_FRACTION * ctx:
            outlier[i] = True
    trusted = reliable & ~outlier
    # absent columns were dropped from `speeds`; map back to matrix columns
    col_of = {float(tm): m for m, tm in enumerate(matrix.times)}
    out = list(speeds)
    for i in np.flatnonzero(~reliable | outlier):
        sel = trusted & (np.abs(t - t[i]) <= CONTEXT_SPAN)
        if not np.any(sel):
            continue
        anchor = sel & primary & ~outlier
        if np.count_nonzero(anchor) >= 5:
            sel = anchor
        ctx = float(np.median(v[sel]))
        if ctx <= 0.0:
            continue
        lag_c = SPEED_RULER_WAVELENGTHS * wavelength / ctx
        win = ((matrix.lags >= CONTEXT_LAG_WINDOW[0] * lag_c)
               & (matrix.lags <= CONTEXT_LAG_WINDOW[1] * lag_c))
        vals = smoothed[:, col_of[float(t[i])]]
        peak = _windowed_peak(matrix.lags, vals, win)
        if peak is None or peak[1] < MIN_REPAIR_PROMINENCE:
            # nothing usable in the expected window (flat or absent)
            if outlier[i]:  # wrong lobe with nothing better: distrust it
                out[i] = SpeedEstimate(float(t[i]), v[i],
                                       speeds[i].peak_lag, 0.0)
            continue
        lag, c = peak
        out[i] = SpeedEstimate(float(t[i]),
                               SPEED_RULER_WAVELENGTHS * wavelength / lag,
                               lag, max(c, CONFIDENCE_THRESHOLD))
    return out


def _windowed_peak(lags: np.ndarray, vals: np.ndarray, win: np.ndarray):
    """Largest sample inside a boolean lag window, quadratically refined.

    The window is assumed to bracket exactly one lobe, so a plain argmax is
    enough; the vertex through the argmax and its grid neighbors (which may
    sit just outside the window) sharpens the lag.  Returns (lag, confidence)
    or None when the window holds fewer than three finite samples.
    """
    idx = np.flatnonzero(win & np.isfinite(vals))
    if len(idx) < 3:
        return None
    j = idx[np.argmax(vals[idx])]
    lo, hi = j - 1, j + 1
    vertex = None
    if lo >= 0 and hi < len(vals) and np.isfinite(vals[lo]) and np.isfinite(vals[hi]):
        vertex = _quadratic_vertex(lags[lo:hi + 1], vals[lo:hi + 1])
    if vertex is None:
        vertex = float(lags[j])
    vertex = float(np.clip(vertex, lags[max(lo, 0)], lags[min(hi, len(lags) - 1)]))
    floor = float(np.min(vals[idx]))
    confidence = float(np.clip((vals[j] - floor) / max(1.0 - floor, 1e-12),
                               0.0, 1.0))
    return vertex, confidence


def speed_series(matrix: TrrsMatrix, wavelength: float,
                 smooth_columns: int = SMOOTH_COLUMNS,
                 median_window: int = MEDIAN_WINDOW,
                 context_repair: bool = True) -> list[SpeedEstimate]:
    """One speed estimate per matrix column (skipping all-absent columns).

    Lag profiles are averaged over ``smooth_columns`` neighboring columns
    before peak fitting and the resulting series is median-filtered, both
    purely to reject scatterer-realization noise; set either to 1 for the
    raw per-column estimator.  With ``context_repair`` the series gets a
    second pass that re-searches weak or wrong-lobe columns in the lag
    window implied by neighboring reliable speeds.
    """
    smoothed = _smooth_profiles(matrix.values, smooth_columns)
    out = []
    for m in range(len(matrix.times)):
        vals = smoothed[:, m]
        if not np.any(np.isfinite(vals)):
            continue
        out.append(estimate_speed(matrix.lags, vals, wavelength,
                                  timestamp=float(matrix.times[m])))
    out = _median_filter(out, median_window)
    if context_repair:
        primary = np.asarray([s.confidence >= CONFIDENCE_THRESHOLD
                              for s in out])
        # iterate so trust spreads from well-conditioned stretches into
        # long weak ones, one context span at a time
        for _ in range(6):
            repaired = _context_repair(out, smoothed, matrix, wavelength,
                                       primary)
            n_before = sum(s.confidence >= CONFIDENCE_THRESHOLD for s in out)
            n_after = sum(s.confidence >= CONFIDENCE_THRESHOLD for s in repaired)
            out = repaired
            if n_after <= n_before:
                break
    return out


def _effective_speeds(speeds: list[SpeedEstimate],
                      confidence_threshold: float,
                      hold_time: float) -> np.ndarray:
    """Apply the hold-then-decay rule to low-confidence estimates."""
    eff = np.zeros(len(speeds))
    last_speed = 0.0
    last_time = -np.inf
    for i, s in enumerate(speeds):
        if s.confidence >= confidence_threshold:
            eff[i] = s.speed
            last_speed = s.speed
            last_time = s.timestamp
        elif s.timestamp - last_time <= hold_time:
            eff[i] = last_speed
        else:
            eff[i] = 0.0
    return eff


def integrate_distance(speeds: list[SpeedEstimate],
                       confidence_threshold: float = CONFIDENCE_THRESHOLD,
                       hold_time: float = HOLD_TIME,
                       t_start: float | None = None,
                       t_end: float | None = None) -> DistanceTrack:
    """Trapezoidal integration of instantaneous speed into moving distance.

    Low-confidence estimates contribute the last reliable speed for up to
    ``hold_time`` seconds, then zero.  ``t_start`` / ``t_end`` optionally
    extend the integration to the trajectory boundaries by holding the
    first / last effective speed flat over the uncovered edge intervals.
    """
    if not speeds:
        return DistanceTrack(0.0, [])
    ts = np.asarray([s.timestamp for s in speeds])
    if np.any(np.diff(ts) <= 0.0):
        raise ParameterError("speed timestamps must be strictly increasing")
    eff = _effective_speeds(speeds, confidence_threshold, hold_time)
    increments = []
    if t_start is not None and t_start < ts[0]:
        increments.append((float(t_start), float(ts[0]),
                           float(eff[0] * (ts[0] - t_start))))
    for i in range(1, len(ts)):
        d = 0.5 * (eff[i - 1] + eff[i]) * (ts[i] - ts[i - 1])
        increments.append((float(ts[i - 1]), float(ts[i]), float(d)))
    if t_end is not None and t_end > ts[-1]:
        increments.append((float(ts[-1]), float(t_end),
                           float(eff[-1] * (t_end - ts[-1]))))
    total = float(sum(d for _, _, d in increments))
    return DistanceTrack(cumulative_distance=total, increments=increments)


def packet_loss_sweep(trajectory, wavelength: float, loss_rates,
                      trials: int, seed: int, max_lag: float = 0.16,
                      t_start: float | None = None,
                      t_end: float | None = None) -> list[tuple]:
    """Distance-estimate statistics under i.i.d. measurement drops.

    ``trajectory`` is the fully sampled stream of responses.  For each loss
    rate, measurements are dropped independently at that rate (every TRRS
    entry touching a dropped instant becomes absent), the speed/distance
    pipeline is re-run, and the sample mean and standard deviation of the
    estimated distance over ``trials`` runs are reported as
    (loss_rate, mean_distance, std_distance) rows.

    The sweep runs the per-measurement estimator (no profile smoothing or
    context repair): cross-column averaging would re-impute the dropped
    entries and hide the effect being measured.
    """
    from .trrs import trrs_sliding_matrix

    matrix = trrs_sliding_matrix(trajectory, max_lag)
    return _loss_sweep_on_matrix(matrix, wavelength, loss_rates, trials, seed,
                                 t_start=t_start, t_end=t_end)


def _loss_sweep_on_matrix(matrix: TrrsMatrix, wavelength: float,
                          loss_rates, trials: int, seed: int,
                          t_start: float | None = None,
                          t_end: float | None = None) -> list[tuple]:
    rates = [float(r) for r in loss_rates]
    if any(r < 0.0 or r >= 1.0 for r in rates):
        raise ParameterError("loss rates must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    n = len(matrix.times)
    n_lags = len(matrix.lags)
    rows = []
    for rate in rates:
        dists = []
        for _ in range(max(trials, 1)):
            keep = rng.random(n) >= rate
            vals = matrix.values.copy()
            vals[:, ~keep] = np.nan
            # an entry also dies when its *earlier* endpoint was dropped
            dropped = np.nonzero(~keep)[0]
            if len(dropped):
                ks = np.arange(1, n_lags + 1)
                cols = dropped[:, None] + ks[None, :]
                rows_k = np.broadcast_to(ks - 1, cols.shape)
                ok = cols < n
                vals[rows_k[ok], cols[ok]] = np.nan
            sub = TrrsMatrix(times=matrix.times, lags=matrix.lags, values=vals)
            speeds = speed_series(sub, wavelength, smooth_columns=1,
                                  median_window=1, context_repair=False)
            track = integrate_distance(speeds, t_start=t_start, t_end=t_end)
            dists.append(track.cumulative_distance)
        dists = np.asarray(dists)
        rows.append((rate, float(np.mean(dists)), float(np.std(dists))))
    return rows
