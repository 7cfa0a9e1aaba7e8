import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hurst_lab.dfa import (
    FluctuationCurve,
    _fluctuation,
    _residuals,
    box_detrend_residuals,
    dfa_estimate,
    fit_hurst,
    fit_loglog,
    fluctuation,
    hurst_of_window,
)
from hurst_lab.divisor import DivisorPlan, case_a_plan, case_b_plan
from hurst_lab.errors import (
    BoxTooSmall,
    DegenerateFluctuation,
    NotADivisor,
    TooFewPoints,
)
from hurst_lab.series import Profile, ReturnSeries, profile_array
from hurst_lab.synth import SeedSpec, gaussian_array

from oracles import naive_box_residuals, naive_fluctuation, naive_hurst, naive_ols


def test_linear_profile_has_zero_residuals():
    res = box_detrend_residuals(Profile(np.arange(1.0, 9.0)), 4)
    np.testing.assert_allclose(res, 0.0, atol=1e-12)


def test_two_point_boxes_fit_exactly():
    # the public entry point refuses boxes below 4; the kernel handles any N
    np.testing.assert_allclose(_residuals(np.array([0.0, 1, 0, 1]), 2), 0.0, atol=1e-12)
    with pytest.raises(BoxTooSmall):
        box_detrend_residuals(Profile([0.0, 1, 0, 1]), 2)


def test_three_point_boxes_match_oracle():
    x = [0.0, 1, 0, -1, 0, 1]
    expected = naive_box_residuals(x, 3)
    np.testing.assert_allclose(expected, [-1 / 3, 2 / 3, -1 / 3, 0, 0, 0], atol=1e-15)
    np.testing.assert_allclose(_residuals(np.array(x), 3), expected, atol=1e-12)


def test_not_a_divisor():
    with pytest.raises(NotADivisor):
        box_detrend_residuals(Profile(np.arange(12.0)), 5)


def test_fluctuation_matches_oracle():
    x = [0.0, 1, 0, -1, 0, 1, 0, -1]
    f = fluctuation(Profile(x), 4)
    # per box residuals (-0.6, 0.8, 0.2, -0.4): mean square 0.3
    assert naive_fluctuation(x, 4) == pytest.approx(math.sqrt(0.3), abs=1e-15)
    assert f == pytest.approx(naive_fluctuation(x, 4), abs=1e-12)


@pytest.mark.parametrize("N", [4, 8, 16])
def test_linear_profile_is_degenerate(N):
    with pytest.raises(DegenerateFluctuation):
        fluctuation(Profile(3.0 * np.arange(32.0) - 7), N)


@given(st.floats(min_value=1e-3, max_value=1e3))
def test_fluctuation_homogeneous(lam):
    x = np.cumsum(gaussian_array(64, SeedSpec(3)))
    assert fluctuation(Profile(lam * x), 8) == pytest.approx(lam * fluctuation(Profile(x), 8), rel=1e-12)


def test_fit_exact_power_law():
    c = 2.7
    est = fit_hurst(FluctuationCurve(tuple((n, c * n ** 0.5) for n in (8, 16, 32))))
    assert est.h == pytest.approx(0.5, abs=1e-12)
    assert est.r_squared == pytest.approx(1.0, abs=1e-12)
    assert est.n_points == 3 == len(est.residuals)


def test_fit_flat_curve():
    assert fit_hurst(FluctuationCurve(((8, 1.3), (16, 1.3)))).h == 0.0


def test_fit_noisy_curve_matches_oracle():
    rng = np.random.default_rng(5)
    sizes = [8, 16, 32, 64, 128]
    values = [n ** 0.6 * math.exp(0.1 * e) for n, e in zip(sizes, rng.standard_normal(5))]
    est = fit_hurst(FluctuationCurve(tuple(zip(sizes, values))))
    slope, intercept = naive_ols([math.log(n) for n in sizes], [math.log(v) for v in values])
    assert est.h == pytest.approx(slope, abs=1e-12)
    assert est.intercept == pytest.approx(intercept, abs=1e-12)
    assert 0.0 <= est.r_squared <= 1.0


def test_fit_too_few_points():
    with pytest.raises(TooFewPoints):
        fit_hurst(FluctuationCurve(((8, 1.0),)))


def test_curve_rejects_bad_points():
    with pytest.raises(DegenerateFluctuation):
        FluctuationCurve(((8, 1.0), (16, 0.0)))
    with pytest.raises(ValueError):
        FluctuationCurve(((16, 1.0), (8, 2.0)))


@given(st.lists(st.floats(min_value=1e-3, max_value=1e3), min_size=3, max_size=8))
def test_log_base_invariance(values):
    sizes = [4 * 2 ** i for i in range(len(values))]
    natural = fit_loglog(sizes, values)[0]
    lx, ly = np.log10(sizes), np.log10(values)
    base10 = np.polyfit(lx, ly, 1)[0] if np.ptp(ly) else 0.0
    assert natural == pytest.approx(base10, abs=1e-12)


def test_dfa_single_draw_sanity_band():
    r = ReturnSeries(gaussian_array(2048, SeedSpec(2024, 1)))
    est = dfa_estimate(r, case_a_plan(11))
    assert abs(est.h - 0.5) < 5 * 0.0377
    assert est.plan_label == "caseA-2048"


def test_dfa_constant_returns_degenerate():
    with pytest.raises(DegenerateFluctuation):
        dfa_estimate(ReturnSeries(np.full(64, 0.01)), case_a_plan(6))


def test_dfa_window_offset():
    data = gaussian_array(100, SeedSpec(9))
    plan = case_a_plan(6)
    est = dfa_estimate(ReturnSeries(data), plan, start=20)
    assert est.h == dfa_estimate(ReturnSeries(data[20:84]), plan).h


seeds = st.integers(min_value=0, max_value=2 ** 32)
scales = st.floats(min_value=1e-4, max_value=1e4)


@given(seeds, scales)
def test_h_scale_invariant(seed, lam):
    data = gaussian_array(256, SeedSpec(seed))
    plan = case_a_plan(8)
    h = dfa_estimate(ReturnSeries(data), plan).h
    assert dfa_estimate(ReturnSeries(lam * data), plan).h == pytest.approx(h, abs=1e-9)


@given(seeds, st.sampled_from([-3.0, -0.5, 0.25, 1.0, 8.0]))
def test_h_shift_invariant(seed, c):
    # shifts that are exact in binary keep the demeaned window bit-identical
    data = np.round(gaussian_array(128, SeedSpec(seed)) * 1024) / 1024
    plan = case_a_plan(7)
    assert dfa_estimate(ReturnSeries(data + c), plan).h == dfa_estimate(ReturnSeries(data), plan).h


@given(seeds, st.floats(min_value=-1e3, max_value=1e3))
def test_h_shift_invariant_general(seed, c):
    data = gaussian_array(128, SeedSpec(seed))
    plan = case_a_plan(7)
    h0 = dfa_estimate(ReturnSeries(data), plan).h
    assert dfa_estimate(ReturnSeries(data + c), plan).h == pytest.approx(h0, abs=1e-9)


def test_fluctuation_grows_with_scale_on_average():
    plan = case_a_plan(8)
    ratios = []
    for r in range(1000):
        x = np.cumsum(gaussian_array(256, SeedSpec(77, r)))
        x -= np.linspace(0, x[-1], x.size)
        ratios.append(fluctuation(Profile(x), plan.box_sizes[-1]) / fluctuation(Profile(x), plan.box_sizes[0]))
    assert np.mean(ratios) > 1


OR_CASES = [
    (12, (4, 6)),
    (16, (4, 8)),
    (60, (4, 5, 6, 10, 12, 15, 20, 30)),
    (64, (4, 8, 16, 32)),
    (64, (8, 16, 32)),
]


@pytest.mark.parametrize("seed", range(100))
def test_oracle_equivalence_small_windows(seed):
    L, sizes = OR_CASES[seed % len(OR_CASES)]
    data = gaussian_array(L, SeedSpec(31337, seed))
    plan = DivisorPlan(L, sizes)
    h = dfa_estimate(ReturnSeries(data), plan).h
    assert h == pytest.approx(naive_hurst(data.tolist(), sizes), abs=1e-10)
    assert hurst_of_window(data, plan) == h


@pytest.mark.parametrize("seed", range(20))
def test_oracle_equivalence_length_8_kernel(seed):
    # no valid plan exists for L=8 (needs two box sizes in [4, L/2]) and
    # size-2 boxes are always fitted exactly, so compare the unguarded
    # kernels at box sizes 4 and 8
    data = gaussian_array(8, SeedSpec(4242, seed))
    x = profile_array(data)
    fs = [_fluctuation(x, n) for n in (4, 8)]
    h = fit_loglog((4, 8), fs)[0]
    assert h == pytest.approx(naive_hurst(data.tolist(), (4, 8)), abs=1e-10)
