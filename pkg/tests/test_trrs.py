"""Resonating-strength algebra, series/matrix construction, decay model."""

import numpy as np
import pytest

from trtrack.bessel import J0_FIRST_ZERO, J0SQ_FIRST_PEAK, j0
from trtrack.channel import Cir
from trtrack.errors import DegenerateInputError, ParameterError
from trtrack.trrs import (bessel_reference, temporal_focusing_profile, trrs,
                          trrs_series, trrs_sliding_matrix)

from conftest import random_cir


# ---------------------------------------------------------------------------
# algebraic property suite

def test_trrs_identity_exact(rng):
    for _ in range(100):
        h = random_cir(rng)
        assert trrs(h, h) == pytest.approx(1.0, abs=1e-12)


def test_trrs_property_suite_1000_cirs(rng):
    # symmetry, scale invariance and range over 1000 random pairs
    for _ in range(1000):
        h1 = random_cir(rng)
        h2 = random_cir(rng)
        v = trrs(h1, h2)
        assert 0.0 <= v <= 1.0
        assert trrs(h2, h1) == v
        c = complex(rng.standard_normal(), rng.standard_normal())
        scaled = Cir(taps=c * h1.taps, timestamp=0.0)
        assert trrs(scaled, h2) == pytest.approx(v, abs=1e-12)


def test_trrs_orthogonal():
    a = Cir(taps=np.array([1.0 + 0j, 0.0]), timestamp=0.0)
    b = Cir(taps=np.array([0.0, 1.0 + 0j]), timestamp=0.0)
    assert trrs(a, b) == 0.0


def test_trrs_errors():
    good = Cir(taps=np.array([1.0 + 0j, 0.0]), timestamp=0.0)
    zero = Cir(taps=np.zeros(2, dtype=complex), timestamp=0.0)
    short = Cir(taps=np.ones(3, dtype=complex), timestamp=0.0)
    with pytest.raises(DegenerateInputError):
        trrs(good, zero)
    with pytest.raises(ParameterError):
        trrs(good, short)


# ---------------------------------------------------------------------------
# theoretical decay

def test_bessel_reference_values():
    lam = 0.0517
    assert bessel_reference(0.0, lam) == 1.0
    peak_d = J0SQ_FIRST_PEAK / (2 * np.pi) * lam
    assert bessel_reference(peak_d, lam) == pytest.approx(j0(J0SQ_FIRST_PEAK) ** 2)
    null_d = J0_FIRST_ZERO / (2 * np.pi) * lam
    assert bessel_reference(null_d, lam) == pytest.approx(0.0, abs=1e-12)
    # the peak is a local maximum of the reference
    eps = 1e-5 * lam
    assert bessel_reference(peak_d, lam) > bessel_reference(peak_d - eps, lam)
    assert bessel_reference(peak_d, lam) > bessel_reference(peak_d + eps, lam)


def test_bessel_reference_validation():
    with pytest.raises(ParameterError):
        bessel_reference(-0.1, 0.05)
    with pytest.raises(ParameterError):
        bessel_reference(0.1, 0.0)


def test_synthesized_decay_hits_first_null(nlos_scene):
    # at the first-null displacement the mean TRRS over seeds is near zero
    from trtrack.channel import generate_scene, synthesize_cirs

    lam = nlos_scene.wavelength
    null_d = J0_FIRST_ZERO / (2 * np.pi) * lam
    vals = []
    for seed in range(50):
        scene = generate_scene(seed=seed, n_scatterers=200, region_side=7.5,
                               tx_rx_separation=30.0, carrier_f0=5.8e9,
                               bandwidth=500e6, include_direct_path=False)
        c0, c1 = synthesize_cirs(scene, [[0.0, 0.0], [null_d, 0.0]], [0.0, 1.0])
        vals.append(trrs(c0, c1))
    assert np.mean(vals) < 0.1


# ---------------------------------------------------------------------------
# series and sliding matrix

def test_series_reference_only(rng):
    h = random_cir(rng, timestamp=2.0)
    series = trrs_series(h, [h])
    assert len(series) == 1
    assert series.values[0] == pytest.approx(1.0, abs=1e-12)
    assert series.reference_timestamp == 2.0


def test_series_empty(rng):
    series = trrs_series(random_cir(rng), [])
    assert len(series) == 0


def test_series_unordered(rng):
    ref = random_cir(rng)
    stream = [random_cir(rng, timestamp=1.0), random_cir(rng, timestamp=0.5)]
    with pytest.raises(ParameterError):
        trrs_series(ref, stream)


def test_series_peaks_align_with_decay(straight_line_cirs, nlos_scene):
    # walking at 1 m/s: series maxima sit near d = 0 and d = 0.61 lambda
    series = trrs_series(straight_line_cirs[0], straight_line_cirs)
    lam = nlos_scene.wavelength
    vals = series.values
    # first local max after the initial decay
    i = 1
    while i < len(vals) - 1 and not (vals[i] >= vals[i - 1]
                                     and vals[i] > vals[i + 1]):
        i += 1
    d_peak = series.timestamps[i] * 1.0  # 1 m/s
    expected = J0SQ_FIRST_PEAK / (2 * np.pi) * lam
    assert abs(d_peak - expected) <= 0.005 + 1e-12  # one sample period


def test_sliding_matrix_constant_stream(rng):
    h = random_cir(rng)
    stream = [Cir(taps=h.taps, timestamp=0.005 * i) for i in range(10)]
    m = trrs_sliding_matrix(stream, 0.02)
    assert m.values.shape == (4, 10)
    finite = np.isfinite(m.values)
    assert np.all(m.values[finite] == pytest.approx(1.0))


def test_sliding_matrix_lag_grid(straight_line_cirs):
    m = trrs_sliding_matrix(straight_line_cirs, 0.16)
    assert m.sample_period == pytest.approx(0.005)
    assert len(m.lags) == 32
    assert np.allclose(np.diff(m.lags), 0.005)
    # head columns have NaN where the lag reaches before the stream start
    assert np.isnan(m.values[5, 3])
    assert np.isfinite(m.values[5, 10])


def test_sliding_matrix_entries_match_pairwise(straight_line_cirs):
    m = trrs_sliding_matrix(straight_line_cirs, 0.03)
    k, col = 3, 15
    expected = trrs(straight_line_cirs[col - (k + 1)], straight_line_cirs[col])
    assert m.values[k, col] == pytest.approx(expected, abs=1e-12)


def test_sliding_matrix_dropped_sample_leaves_nan(straight_line_cirs):
    stream = straight_line_cirs[:30]
    holed = stream[:10] + stream[11:]
    m = trrs_sliding_matrix(holed, 0.03)
    # any entry whose lag partner is the dropped instant is absent
    col = 12  # timestamp 0.065: lag 0.015 reaches the hole at 0.05
    k = int(round((holed[col].timestamp - stream[10].timestamp) / 0.005)) - 1
    assert np.isnan(m.values[k, col])


def test_sliding_matrix_validation(rng):
    stream = [random_cir(rng, timestamp=0.0), random_cir(rng, timestamp=0.005)]
    with pytest.raises(ParameterError):
        trrs_sliding_matrix(stream, 0.0)
    bad = [stream[1], stream[0]]
    with pytest.raises(ParameterError):
        trrs_sliding_matrix(bad, 0.16)


def test_temporal_profile_zero_lag_matches_trrs(rng):
    h1, h2 = random_cir(rng), random_cir(rng)
    prof = temporal_focusing_profile(h1, h2)
    assert len(prof) == 2 * len(h1.taps) - 1
    assert prof[len(h1.taps) - 1] == pytest.approx(trrs(h1, h2), abs=1e-12)
    # self-profile peaks at zero lag with value 1
    self_prof = temporal_focusing_profile(h1, h1)
    assert np.argmax(self_prof) == len(h1.taps) - 1
    assert self_prof.max() == pytest.approx(1.0)
