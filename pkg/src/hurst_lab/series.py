"""Raw series ingestion, log-returns and the cumulative demeaned profile."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import (
    NonFiniteValue,
    NonPositivePrice,
    TooShort,
    WindowOutOfBounds,
)


class SeriesKind(str, enum.Enum):
    PRICES = "prices"
    INCREMENTS = "increments"


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError("series must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RawSeries:
    """Prices S_t or pre-computed increments, optionally with timestamps."""

    values: np.ndarray
    kind: SeriesKind = SeriesKind.PRICES
    timestamps: Optional[tuple] = None

    def __post_init__(self):
        values = _frozen_array(self.values)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "kind", SeriesKind(self.kind))
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise NonFiniteValue(f"value at position {bad[0]} is not finite")
        if self.kind is SeriesKind.PRICES:
            if values.size < 2:
                raise TooShort("need at least two prices to form a return")
            nonpos = np.flatnonzero(values <= 0)
            if nonpos.size:
                raise NonPositivePrice(int(nonpos[0]), float(values[nonpos[0]]))

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class ReturnSeries:
    returns: np.ndarray
    mean: float = field(init=False)

    def __post_init__(self):
        returns = _frozen_array(self.returns)
        if not np.all(np.isfinite(returns)):
            raise NonFiniteValue("returns must be finite")
        object.__setattr__(self, "returns", returns)
        object.__setattr__(self, "mean", float(returns.mean()) if returns.size else math.nan)

    def __len__(self) -> int:
        return self.returns.size


@dataclass(frozen=True)
class Profile:
    """Partial sums X(1..L) of the window's demeaned returns."""

    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen_array(self.x))

    @property
    def window_length(self) -> int:
        return self.x.size


def log_returns(raw: RawSeries) -> ReturnSeries:
    if raw.kind is not SeriesKind.PRICES:
        raise ValueError("log_returns expects a price series")
    return ReturnSeries(np.diff(np.log(raw.values)))


def as_returns(raw: RawSeries) -> ReturnSeries:
    """Route a raw series into return space (increments pass through)."""
    if raw.kind is SeriesKind.INCREMENTS:
        return ReturnSeries(raw.values)
    return log_returns(raw)


def profile_array(r: np.ndarray) -> np.ndarray:
    """Cumulative sum of ``r`` minus its own mean."""
    r = np.asarray(r, dtype=float)
    return np.cumsum(r - r.mean())


def build_profile(r: ReturnSeries, start: int = 0, length: Optional[int] = None) -> Profile:
    """Profile of the window ``r[start:start+length]``.

    The mean is taken over the window only, so each window is analysed
    independently of the rest of the series.
    """
    n = len(r)
    if length is None:
        length = n - start
    if start < 0 or length < 2 or start + length > n:
        raise WindowOutOfBounds(
            f"window [{start}, {start + length}) does not fit a series of {n} returns"
        )
    return Profile(profile_array(r.returns[start:start + length]))


def _parse_float(text: str, lineno: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"line {lineno}: cannot parse {text.strip()!r} as a number") from None


def read_csv(path, kind: SeriesKind | str = SeriesKind.PRICES) -> RawSeries:
    """Read a one-column (value) or two-column (timestamp,value) CSV.

    Lines starting with ``#`` are skipped; a non-numeric first row is
    treated as a header. Errors mention the
    1-based line number of the offending row.
    """
    kind = SeriesKind(kind)
    values: list[float] = []
    stamps: list[str] = []
    linenos: list[int] = []
    header_seen = False
    with open(Path(path), newline="", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.startswith("#"):
                continue
            row = next(csv.reader([line]), [])
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) > 2:
                raise ValueError(f"line {lineno}: expected 1 or 2 columns, got {len(row)}")
            cell = row[-1]
            if not values and not header_seen:
                header_seen = True
                try:
                    float(cell)
                except ValueError:
                    continue  # header
            values.append(_parse_float(cell, lineno))
            linenos.append(lineno)
            if len(row) == 2:
                stamps.append(row[0].strip())
    if kind is SeriesKind.PRICES:
        for v, lineno in zip(values, linenos):
            if not v > 0:
                raise _price_error(lineno, v)
    return RawSeries(np.array(values), kind, tuple(stamps) if stamps else None)


def _price_error(lineno: int, value: float) -> NonPositivePrice:
    err = NonPositivePrice(lineno, value)
    err.args = (f"line {lineno}: price is not strictly positive: {value!r}",)
    return err

