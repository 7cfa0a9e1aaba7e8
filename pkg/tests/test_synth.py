import numpy as np
import pytest

from hurst_lab.errors import OutOfRange
from hurst_lab.synth import (
    SeedSpec,
    fgn_array,
    fgn_autocovariance,
    fgn_series,
    gaussian_array,
    gaussian_series,
)


def test_gaussian_deterministic():
    a = gaussian_series(1000, SeedSpec(42, 3)).returns
    b = gaussian_series(1000, SeedSpec(42, 3)).returns
    assert a.tobytes() == b.tobytes()


def test_streams_and_seeds_differ():
    a = gaussian_array(100, SeedSpec(42, 0))
    assert not np.array_equal(a, gaussian_array(100, SeedSpec(42, 1)))
    assert not np.array_equal(a, gaussian_array(100, SeedSpec(43, 0)))


def test_prefix_property():
    # a shorter window is a prefix of a longer one from the same stream
    np.testing.assert_array_equal(gaussian_array(64, SeedSpec(5, 9)),
                                  gaussian_array(128, SeedSpec(5, 9))[:64])


@pytest.mark.parametrize("seed", [0, 1, 2 ** 64 - 1])
def test_gaussian_moments(seed):
    x = gaussian_array(100_000, SeedSpec(seed, 7))
    assert abs(x.mean()) < 0.02
    assert 0.98 < x.var() < 1.02


def test_stream_independence():
    a = gaussian_array(10_000, SeedSpec(1, 0))
    b = gaussian_array(10_000, SeedSpec(1, 1))
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.04


def test_seed_range():
    with pytest.raises(OutOfRange):
        SeedSpec(-1)
    with pytest.raises(OutOfRange):
        SeedSpec(0, 2 ** 64)


def test_autocovariance_closed_form():
    assert fgn_autocovariance(0, 0.7) == pytest.approx(1.0)
    np.testing.assert_allclose(fgn_autocovariance(np.arange(1, 6), 0.5), 0.0, atol=1e-15)
    assert fgn_autocovariance(1, 0.7) == pytest.approx(0.5 * (2 ** 1.4 - 2), rel=1e-14)


def _lag1(x):
    return np.corrcoef(x[:-1], x[1:])[0, 1]


def test_fgn_half_is_white():
    assert abs(_lag1(fgn_array(100_000, 0.5, SeedSpec(8)))) < 0.013


def test_fgn_lag1_at_0_7():
    gamma1 = 0.5 * (2 ** 1.4 - 2)  # 0.3195
    # across-seed SD of this statistic is about 0.0035, so 0.02 is > 5 SD
    assert abs(_lag1(fgn_array(100_000, 0.7, SeedSpec(8))) - gamma1) < 0.02


def test_fgn_deterministic():
    a = fgn_series(500, 0.3, SeedSpec(11, 2)).returns
    b = fgn_series(500, 0.3, SeedSpec(11, 2)).returns
    assert a.tobytes() == b.tobytes()


@pytest.mark.parametrize("h", [0.3, 0.7])
def test_fgn_autocovariance_within_4_standard_errors(h):
    n, reps, lags = 200_000, 20, 6
    est = np.empty((reps, lags))
    for r in range(reps):
        x = fgn_array(n, h, SeedSpec(2718, r))
        # zero-mean process: no demeaning, so the estimator is unbiased
        est[r] = [x[: n - k] @ x[k:] / (n - k) for k in range(lags)]
    mean = est.mean(axis=0)
    se = est.std(axis=0, ddof=1) / np.sqrt(reps)
    gamma = fgn_autocovariance(np.arange(lags), h)
    assert np.all(np.abs(mean - gamma) < 4 * se), (mean, gamma, se)


@pytest.mark.parametrize("n, h", [(1, 0.5), (10, 0.0), (10, 1.0)])
def test_fgn_bad_arguments(n, h):
    with pytest.raises(OutOfRange):
        fgn_array(n, h, SeedSpec(0))
