"""Divisor enumeration and box-size plans for DFA."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import NotEnoughDivisors, OutOfRange, PlanViolatesInvariants

#: Smallest box size any plan may use.
MIN_BOX = 4
#: Smallest box size recommended for estimation; smaller boxes trigger a warning.
RECOMMENDED_MIN_BOX = 8

#: (L, d, N_min) rows for the multiples-of-60 family.
CASE_B_ROWS = (
    (60, 5, 10),
    (120, 8, 10),
    (240, 10, 12),
    (480, 12, 15),
    (960, 14, 20),
    (1920, 16, 30),
    (3840, 18, 40),
    (7680, 20, 48),
)
CASE_A_EXPONENTS = range(6, 14)


@dataclass(frozen=True)
class DivisorPlan:
    window_length: int
    box_sizes: tuple
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "box_sizes", tuple(int(n) for n in self.box_sizes))
        L = int(self.window_length)
        object.__setattr__(self, "window_length", L)
        sizes = self.box_sizes
        if len(sizes) < 2:
            raise PlanViolatesInvariants(f"a plan needs at least 2 box sizes, got {list(sizes)}")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise PlanViolatesInvariants(f"box sizes must be strictly increasing: {list(sizes)}")
        bad = [n for n in sizes if n <= 0 or L % n]
        if bad:
            raise PlanViolatesInvariants(f"box sizes {bad} do not divide L={L}")
        if sizes[0] < MIN_BOX:
            raise PlanViolatesInvariants(f"smallest box {sizes[0]} is below {MIN_BOX}")
        if sizes[-1] > L // 2:
            raise PlanViolatesInvariants(f"largest box {sizes[-1]} exceeds L/2={L // 2}")

    @property
    def d(self) -> int:
        return len(self.box_sizes)

    @property
    def n_min(self) -> int:
        return self.box_sizes[0]

    def to_dict(self) -> dict:
        return {"L": self.window_length, "box_sizes": list(self.box_sizes), "label": self.label}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "DivisorPlan":
        return cls(data["L"], tuple(data["box_sizes"]), data.get("label", ""))


@dataclass(frozen=True)
class AllFrom:
    min_divisor: int


@dataclass(frozen=True)
class LowestCount:
    d: int
    min_divisor: int


@dataclass(frozen=True)
class ConsecutiveWindow:
    """``d`` consecutive eligible divisors starting at 1-based ``start_rank``."""

    start_rank: int
    d: int
    min_divisor: int = MIN_BOX


@dataclass(frozen=True)
class Explicit:
    box_sizes: tuple


SelectionStrategy = Union[AllFrom, LowestCount, ConsecutiveWindow, Explicit]


def divisors_of(L: int) -> list[int]:
    if L < 1:
        raise ValueError("L must be positive")
    small, large = [], []
    for k in range(1, math.isqrt(L) + 1):
        if L % k == 0:
            small.append(k)
            if k != L // k:
                large.append(L // k)
    return small + large[::-1]


def eligible_divisors(L: int, min_divisor: int = MIN_BOX) -> list[int]:
    """Divisors of ``L`` in ``[max(min_divisor, 4), L/2]``."""
    lo = max(min_divisor, MIN_BOX)
    return [n for n in divisors_of(L) if lo <= n <= L // 2]


def resolve_plan(L: int, strategy: SelectionStrategy, label: Optional[str] = None) -> DivisorPlan:
    if L < 8:
        raise OutOfRange(f"window length must be at least 8, got {L}")
    if isinstance(strategy, Explicit):
        sizes = tuple(strategy.box_sizes)
    elif isinstance(strategy, AllFrom):
        _positive(strategy.min_divisor)
        sizes = eligible_divisors(L, strategy.min_divisor)
        if len(sizes) < 2:
            raise NotEnoughDivisors(
                f"L={L} has {len(sizes)} divisors in [{strategy.min_divisor}, {L // 2}]"
            )
    elif isinstance(strategy, LowestCount):
        _positive(strategy.d, strategy.min_divisor)
        pool = eligible_divisors(L, strategy.min_divisor)
        if len(pool) < strategy.d:
            raise NotEnoughDivisors(
                f"L={L} has only {len(pool)} divisors in [{strategy.min_divisor}, {L // 2}], "
                f"{strategy.d} requested"
            )
        sizes = pool[: strategy.d]
    elif isinstance(strategy, ConsecutiveWindow):
        _positive(strategy.start_rank, strategy.d, strategy.min_divisor)
        pool = eligible_divisors(L, strategy.min_divisor)
        lo = strategy.start_rank - 1
        if lo + strategy.d > len(pool):
            raise NotEnoughDivisors(
                f"ranks {strategy.start_rank}..{lo + strategy.d} exceed the "
                f"{len(pool)} eligible divisors of L={L}"
            )
        sizes = pool[lo: lo + strategy.d]
    else:
        raise TypeError(f"unknown strategy {strategy!r}")
    return DivisorPlan(L, tuple(sizes), label if label is not None else f"L{L}-{_describe(strategy)}")


def _positive(*values: int) -> None:
    if any(v < 1 for v in values):
        raise OutOfRange(f"strategy parameters must be positive: {values}")


def _describe(strategy: SelectionStrategy) -> str:
    if isinstance(strategy, AllFrom):
        return f"all>={strategy.min_divisor}"
    if isinstance(strategy, LowestCount):
        return f"lowest{strategy.d}>={strategy.min_divisor}"
    if isinstance(strategy, ConsecutiveWindow):
        return f"window{strategy.start_rank}+{strategy.d}"
    return "explicit"


def case_a_plan(n: int) -> DivisorPlan:
    """Powers-of-two window ``L = 2**n`` with every power of two in ``[8, L/2]``."""
    if n not in CASE_A_EXPONENTS:
        raise OutOfRange(f"case A exponent must be in 6..13, got {n}")
    L = 2 ** n
    return DivisorPlan(L, tuple(2 ** k for k in range(3, n)), f"caseA-{L}")


def case_b_plan(k: int) -> DivisorPlan:
    """Row ``k`` (1-based) of the multiples-of-60 family."""
    if not 1 <= k <= len(CASE_B_ROWS):
        raise OutOfRange(f"case B row must be in 1..{len(CASE_B_ROWS)}, got {k}")
    L, d, n_min = CASE_B_ROWS[k - 1]
    return resolve_plan(L, LowestCount(d, n_min), label=f"caseB-{L}")


def case_a_plans() -> list[DivisorPlan]:
    return [case_a_plan(n) for n in CASE_A_EXPONENTS]


def case_b_plans() -> list[DivisorPlan]:
    return [case_b_plan(k) for k in range(1, len(CASE_B_ROWS) + 1)]


def case_b_n_min(L: int) -> Optional[int]:
    for length, _, n_min in CASE_B_ROWS:
        if length == L:
            return n_min
    return None


def evenly_spaced_starts(n_positions: int, n_windows: int) -> list[int]:
    """1-based start ranks spread from 1 to ``n_positions`` as evenly as possible."""
    if n_windows < 2:
        raise OutOfRange("need at least two windows")
    if n_windows > n_positions:
        raise NotEnoughDivisors(
            f"only {n_positions} distinct windows exist, {n_windows} requested"
        )
    # integer rounding (half up) keeps the result platform independent
    return [1 + (2 * i * (n_positions - 1) + (n_windows - 1)) // (2 * (n_windows - 1))
            for i in range(n_windows)]


def parse_plan(text: str, window_length: Optional[int] = None) -> DivisorPlan:
    """Parse CLI plan syntax.

    Accepted forms: ``caseA:2048``, ``caseB:1920``, ``explicit:8,16,32``,
    ``lowest:d=8,min=8``, ``all:min=8`` and ``window:start=1,d=8[,min=4]``.
    All but the case forms need ``window_length``.
    """
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if not arg:
        raise ValueError(f"plan {text!r} is missing its argument after ':'")
    if kind in ("casea", "caseb"):
        L = _int(arg, text)
        if window_length is not None and window_length != L:
            raise ValueError(f"plan {text!r} conflicts with window length {window_length}")
        if kind == "casea":
            n = L.bit_length() - 1
            if 2 ** n != L:
                raise OutOfRange(f"case A length must be a power of two, got {L}")
            return case_a_plan(n)
        for k, row in enumerate(CASE_B_ROWS, start=1):
            if row[0] == L:
                return case_b_plan(k)
        raise OutOfRange(f"case B length must be one of {[r[0] for r in CASE_B_ROWS]}, got {L}")
    if window_length is None:
        raise ValueError(f"plan {text!r} needs an explicit window length")
    if kind == "explicit":
        sizes = tuple(_int(s, text) for s in arg.split(","))
        plan = resolve_plan(window_length, Explicit(sizes))
    else:
        params = _keyvals(arg, text)
        try:
            if kind == "lowest":
                strategy = LowestCount(params.pop("d"), params.pop("min", RECOMMENDED_MIN_BOX))
            elif kind == "all":
                strategy = AllFrom(params.pop("min", RECOMMENDED_MIN_BOX))
            elif kind == "window":
                strategy = ConsecutiveWindow(params.pop("start"), params.pop("d"),
                                             params.pop("min", MIN_BOX))
            else:
                raise ValueError(f"unknown plan kind {kind!r}")
        except KeyError as exc:
            raise ValueError(f"plan {text!r} is missing parameter {exc.args[0]}") from None
        if params:
            raise ValueError(f"plan {text!r} has unknown parameters {sorted(params)}")
        plan = resolve_plan(window_length, strategy)
    if plan.n_min < RECOMMENDED_MIN_BOX:
        warnings.warn(f"box sizes below {RECOMMENDED_MIN_BOX} are not recommended "
                      f"(plan starts at {plan.n_min})", stacklevel=2)
    return plan


def _int(s: str, text: str) -> int:
    try:
        return int(s.strip())
    except ValueError:
        raise ValueError(f"plan {text!r}: {s!r} is not an integer") from None


def _keyvals(arg: str, text: str) -> dict:
    out = {}
    for item in arg.split(","):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"plan {text!r}: expected key=value, got {item!r}")
        out[key.strip()] = _int(val, text)
    return out
