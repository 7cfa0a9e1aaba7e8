"""Detrended fluctuation analysis (first-order detrending)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .divisor import MIN_BOX, DivisorPlan
from .errors import BoxTooSmall, DegenerateFluctuation, NotADivisor, TooFewPoints
from .series import Profile, ReturnSeries, build_profile, profile_array


@dataclass(frozen=True)
class FluctuationCurve:
    points: tuple  # ((N, F), ...)
    plan_label: str = ""

    def __post_init__(self):
        pts = tuple((int(n), float(f)) for n, f in self.points)
        if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
            raise ValueError("box sizes of a fluctuation curve must be strictly increasing")
        if any(not f > 0 for _, f in pts):
            raise DegenerateFluctuation("fluctuation values must be positive")
        object.__setattr__(self, "points", pts)

    @property
    def sizes(self) -> np.ndarray:
        return np.array([n for n, _ in self.points], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([f for _, f in self.points], dtype=float)


@dataclass(frozen=True)
class HurstEstimate:
    h: float
    intercept: float
    r_squared: float
    residuals: tuple
    n_points: int
    plan_label: str = ""
    curve: Optional[FluctuationCurve] = None

    def to_dict(self) -> dict:
        out = {"h": self.h, "intercept": self.intercept, "r2": self.r_squared}
        if self.curve is not None:
            out["curve"] = [[n, f] for n, f in self.curve.points]
        if self.plan_label:
            out["plan"] = self.plan_label
        return out


def _check_box(L: int, N: int) -> None:
    if N < MIN_BOX:
        raise BoxTooSmall(f"box size {N} is below {MIN_BOX}")
    if L % N:
        raise NotADivisor(f"box size {N} does not divide L={L}")


def _residuals(x: np.ndarray, N: int) -> np.ndarray:
    boxes = x.reshape(-1, N)
    t = np.arange(1, N + 1, dtype=float)
    tc = t - t.mean()
    centred = boxes - boxes.mean(axis=1, keepdims=True)
    slope = centred @ tc / (tc @ tc)
    return (centred - slope[:, None] * tc).ravel()


def box_detrend_residuals(p: Profile, N: int) -> np.ndarray:
    """Profile minus its box-wise OLS line, boxes of length ``N`` laid end to end."""
    _check_box(p.window_length, N)
    return _residuals(p.x, N)


def _fluctuation(x: np.ndarray, N: int) -> float:
    res = _residuals(x, N)
    return float(np.sqrt(res @ res / x.size))


def fluctuation(p: Profile, N: int) -> float:
    """RMS of the detrended profile, normalised by L.

    Raises DegenerateFluctuation when the residual vanishes (numerically,
    relative to the profile scale), since log F would be undefined.
    """
    _check_box(p.window_length, N)
    f = _fluctuation(p.x, N)
    if not _nondegenerate(f, p.x):
        raise DegenerateFluctuation(f"fluctuation vanishes at box size {N}")
    return f


def _nondegenerate(f: float, x: np.ndarray) -> bool:
    scale = float(np.max(np.abs(x))) if x.size else 0.0
    return f > 1e-12 * scale and f > 0


def fit_loglog(sizes: Sequence[float], values: Sequence[float]) -> tuple[float, float, float, np.ndarray]:
    """OLS of ln(values) on ln(sizes): (slope, intercept, r_squared, residuals)."""
    lx = np.log(np.asarray(sizes, dtype=float))
    ly = np.log(np.asarray(values, dtype=float))
    return _ols(lx, ly)


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, np.ndarray]:
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = dx @ dx
    slope = (dx @ dy) / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    syy = dy @ dy
    r2 = 1.0 if syy == 0 else 1.0 - (resid @ resid) / syy
    return float(slope), float(intercept), float(min(max(r2, 0.0), 1.0)), resid


def linear_fit(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    """Plain OLS line ``y = slope*x + intercept``: (slope, intercept, r_squared)."""
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        raise TooFewPoints("a line needs at least two points")
    slope, intercept, r2, _ = _ols(x, np.asarray(y, dtype=float))
    return slope, intercept, r2


def fit_hurst(curve: FluctuationCurve) -> HurstEstimate:
    if len(curve.points) < 2:
        raise TooFewPoints("need at least two scales to fit a slope")
    slope, intercept, r2, resid = fit_loglog(curve.sizes, curve.values)
    return HurstEstimate(slope, intercept, r2, tuple(resid.tolist()), len(curve.points),
                         curve.plan_label, curve)


def fluctuation_curve(p: Profile, plan: DivisorPlan) -> FluctuationCurve:
    if p.window_length != plan.window_length:
        raise ValueError(f"profile length {p.window_length} != plan length {plan.window_length}")
    return FluctuationCurve(tuple((n, fluctuation(p, n)) for n in plan.box_sizes), plan.label)


def dfa_estimate(r: ReturnSeries, plan: DivisorPlan, start: int = 0) -> HurstEstimate:
    """Hurst exponent of ``r[start:start+L]`` under ``plan``."""
    p = build_profile(r, start, plan.window_length)
    return fit_hurst(fluctuation_curve(p, plan))


def hurst_of_window(window: np.ndarray, plan: DivisorPlan) -> float:
    """Slope only, for a raw increments array of length L (Monte Carlo fast path).

    Same arithmetic as ``dfa_estimate`` but skips the wrapper objects.
    """
    x = profile_array(window)
    f = np.empty(plan.d)
    for i, n in enumerate(plan.box_sizes):
        f[i] = _fluctuation(x, n)
        if not _nondegenerate(f[i], x):
            raise DegenerateFluctuation(f"fluctuation vanishes at box size {n}")
    return fit_loglog(plan.box_sizes, f)[0]
