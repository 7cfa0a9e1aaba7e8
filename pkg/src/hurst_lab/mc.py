"""Monte Carlo calibration of the DFA Hurst estimator.

Replication ``r`` (1-based) always draws its window from stream ``r`` of the
master seed, so results do not depend on the number of workers or on the
order in which blocks finish.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .dfa import hurst_of_window, linear_fit
from .divisor import (
    RECOMMENDED_MIN_BOX,
    ConsecutiveWindow,
    DivisorPlan,
    LowestCount,
    case_a_plans,
    case_b_n_min,
    case_b_plans,
    eligible_divisors,
    evenly_spaced_starts,
    resolve_plan,
)
from .errors import (
    AllDegenerate,
    DegenerateFluctuation,
    EmptySamples,
    NotEnoughDivisors,
    OutOfRange,
)
from .synth import SeedSpec, fgn_array, gaussian_array

SIGMA_LEVELS = (0.683, 0.955, 0.997)
DEFAULT_REPS = 5000
BLOCK = 250  # replications per task; fixed so blocking never depends on worker count


@dataclass(frozen=True)
class Gaussian:
    def draw(self, n: int, seed: SeedSpec) -> np.ndarray:
        return gaussian_array(n, seed)

    def describe(self) -> dict:
        return {"source": "gaussian"}


@dataclass(frozen=True)
class Fgn:
    h_true: float

    def draw(self, n: int, seed: SeedSpec) -> np.ndarray:
        return fgn_array(n, self.h_true, seed)

    def describe(self) -> dict:
        return {"source": "fgn", "h_true": self.h_true}


Source = Union[Gaussian, Fgn]


@dataclass(frozen=True)
class McConfig:
    plan: DivisorPlan
    replications: int = DEFAULT_REPS
    master_seed: int = 0
    source: Source = Gaussian()

    def __post_init__(self):
        if self.replications < 2:
            raise OutOfRange("need at least two replications")
        SeedSpec(self.master_seed)


@dataclass(frozen=True)
class McSummary:
    plan: DivisorPlan
    mean_h: float
    sd_h: float
    quantile_intervals: dict
    replications: int
    degenerate_count: int
    samples: np.ndarray = field(repr=False, compare=False)

    @property
    def n_effective(self) -> int:
        return self.replications - self.degenerate_count


@dataclass(frozen=True)
class SweepRow:
    x: Union[int, float]
    sd: float
    mean: float
    plan: DivisorPlan
    degenerate_count: int = 0


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    fit: Optional[tuple] = None  # (slope, intercept, r_squared)


def quantile_intervals(samples: Sequence[float],
                       levels: Iterable[float] = SIGMA_LEVELS) -> dict:
    """Central empirical intervals, linear interpolation between order statistics.

    For level p the bounds are the (1-p)/2 and (1+p)/2 sample quantiles
    (numpy ``method="linear"``, Hyndman-Fan type 7).
    """
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise EmptySamples("cannot take quantiles of an empty sample")
    out = {}
    for p in levels:
        if not 0.0 < p < 1.0:
            raise OutOfRange(f"confidence level must lie in (0, 1), got {p}")
        lo, hi = np.quantile(x, [(1 - p) / 2, (1 + p) / 2], method="linear")
        out[p] = (float(lo), float(hi))
    return out


def _run_block(plan: DivisorPlan, source: Source, master_seed: int,
               first: int, last: int) -> np.ndarray:
    out = np.empty(last - first + 1)
    for i, r in enumerate(range(first, last + 1)):
        window = source.draw(plan.window_length, SeedSpec(master_seed, r))
        try:
            out[i] = hurst_of_window(window, plan)
        except DegenerateFluctuation:
            out[i] = np.nan
    return out


def default_workers() -> int:
    env = os.environ.get("HURST_LAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def simulate(cfg: McConfig, workers: int = 1) -> np.ndarray:
    """Raw h values for replications 1..R in order; NaN marks a degenerate draw."""
    blocks = [(a, min(a + BLOCK - 1, cfg.replications))
              for a in range(1, cfg.replications + 1, BLOCK)]
    args = [(cfg.plan, cfg.source, cfg.master_seed, a, b) for a, b in blocks]
    if workers <= 1 or len(blocks) == 1:
        parts = [_run_block(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(blocks))) as pool:
            parts = list(pool.map(_run_block, *zip(*args)))
    return np.concatenate(parts)


def summarize(plan: DivisorPlan, raw: np.ndarray,
              levels: Iterable[float] = SIGMA_LEVELS) -> McSummary:
    ok = raw[~np.isnan(raw)]
    degenerate = int(raw.size - ok.size)
    if ok.size == 0:
        raise AllDegenerate(f"all {raw.size} replications were degenerate")
    sd = float(np.std(ok, ddof=1)) if ok.size > 1 else math.nan
    return McSummary(plan, float(np.mean(ok)), sd, quantile_intervals(ok, levels),
                     int(raw.size), degenerate, ok)


def run_mc(cfg: McConfig, workers: int = 1) -> McSummary:
    return summarize(cfg.plan, simulate(cfg, workers))


def calibrate_tables(replications: int = DEFAULT_REPS, master_seed: int = 0,
                     cases: str = "both", workers: int = 1,
                     source: Source = Gaussian()) -> tuple[list, list]:
    """Run every case A and/or case B plan; rows come back in table order."""
    if replications < 100:
        raise OutOfRange("table calibration needs at least 100 replications")
    cases = cases.lower()
    if cases not in ("a", "b", "both"):
        raise OutOfRange(f"cases must be 'a', 'b' or 'both', got {cases!r}")
    a_rows, b_rows = [], []
    if cases in ("a", "both"):
        a_rows = [run_mc(McConfig(p, replications, master_seed, source), workers)
                  for p in case_a_plans()]
    if cases in ("b", "both"):
        b_rows = [run_mc(McConfig(p, replications, master_seed, source), workers)
                  for p in case_b_plans()]
    return a_rows, b_rows


def sweep_min_divisor(L: int) -> int:
    """Default smallest box for a divisor-count sweep at length ``L``.

    Multiples-of-60 lengths reuse the smallest box of their table row, so
    the largest d reproduces that row; other lengths start at 8.
    """
    n_min = case_b_n_min(L)
    return n_min if n_min is not None else RECOMMENDED_MIN_BOX


def sweep_divisor_count(L: int, d_values: Iterable[int], replications: int,
                        master_seed: int, min_divisor: Optional[int] = None,
                        workers: int = 1, source: Source = Gaussian()) -> SweepResult:
    """SD of h as a function of the number of (lowest) box sizes used."""
    if min_divisor is None:
        min_divisor = sweep_min_divisor(L)
    d_values = list(d_values)
    if not d_values:
        raise OutOfRange("empty divisor-count range")
    plans = [resolve_plan(L, LowestCount(d, min_divisor)) for d in d_values]
    rows = []
    for d, plan in zip(d_values, plans):
        s = run_mc(McConfig(plan, replications, master_seed, source), workers)
        rows.append(SweepRow(d, s.sd_h, s.mean_h, plan, s.degenerate_count))
    fit = None
    if len(rows) >= 2:
        fit = linear_fit([r.x for r in rows], [r.sd for r in rows])
    return SweepResult(tuple(rows), fit)


def choice_plans(L: int, d: int, n_windows: int,
                 min_divisor: int = RECOMMENDED_MIN_BOX) -> list[DivisorPlan]:
    pool = eligible_divisors(L, min_divisor)
    n_positions = len(pool) - d + 1
    if n_positions < 1:
        raise NotEnoughDivisors(f"L={L} has {len(pool)} eligible divisors >= {min_divisor}, "
                                f"{d} requested")
    return [resolve_plan(L, ConsecutiveWindow(s, d, min_divisor))
            for s in evenly_spaced_starts(n_positions, n_windows)]


def sweep_divisor_choice(L: int, d: int, n_windows: int, replications: int,
                         master_seed: int, min_divisor: int = RECOMMENDED_MIN_BOX,
                         workers: int = 1, source: Source = Gaussian()) -> SweepResult:
    """SD of h for consecutive runs of ``d`` box sizes, lowest run first."""
    rows = []
    for plan in choice_plans(L, d, n_windows, min_divisor):
        s = run_mc(McConfig(plan, replications, master_seed, source), workers)
        rows.append(SweepRow(plan.n_min, s.sd_h, s.mean_h, plan, s.degenerate_count))
    return SweepResult(tuple(rows))
