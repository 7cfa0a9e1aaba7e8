"""Seeded synthetic increments: iid Gaussian and fractional Gaussian noise.

Every stream is derived from ``(master_seed, stream_index)`` through
``numpy.random.SeedSequence(master_seed, spawn_key=(stream_index,))`` feeding
a PCG64 bit generator; normals come from numpy's ziggurat sampler
(``Generator.standard_normal``). Golden values depend on this choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EmbeddingNotPSD, OutOfRange
from .series import ReturnSeries

_U64 = 2 ** 64


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            v = getattr(self, name)
            if not 0 <= int(v) < _U64:
                raise OutOfRange(f"{name} must be an unsigned 64-bit integer, got {v}")
            object.__setattr__(self, name, int(v))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.PCG64(ss))


def gaussian_array(n: int, seed: SeedSpec) -> np.ndarray:
    if n < 1:
        raise OutOfRange("n must be positive")
    return seed.generator().standard_normal(n)


def gaussian_series(n: int, seed: SeedSpec) -> ReturnSeries:
    return ReturnSeries(gaussian_array(n, seed))


def fgn_autocovariance(k, h: float) -> np.ndarray:
    """Unit-variance fGn autocovariance at integer lags ``k``."""
    k = np.abs(np.asarray(k, dtype=float))
    H2 = 2.0 * h
    return 0.5 * (np.abs(k + 1) ** H2 - 2 * k ** H2 + np.abs(k - 1) ** H2)


@lru_cache(maxsize=32)
def _embedding_sqrt(n: int, h: float) -> np.ndarray:
    # circulant of size m = 2n whose first row is gamma(0..n), gamma(n-1..1)
    m = 2 * n
    gamma = fgn_autocovariance(np.arange(n + 1), h)
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    lam = np.fft.fft(row).real
    if lam.min() < -1e-10 * lam.max():
        raise EmbeddingNotPSD(f"circulant eigenvalue {lam.min():.3e} < 0 for n={n}, h={h}")
    scale = np.sqrt(np.clip(lam, 0.0, None) / m)
    scale.setflags(write=False)
    return scale


def fgn_array(n: int, h: float, seed: SeedSpec) -> np.ndarray:
    """Exact fGn sample of length ``n`` by circulant embedding (Davies-Harte)."""
    if n < 2:
        raise OutOfRange("n must be at least 2")
    if not 0.0 < h < 1.0:
        raise OutOfRange(f"h must lie in (0, 1), got {h}")
    scale = _embedding_sqrt(n, float(h))
    rng = seed.generator()
    m = scale.size
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return np.fft.fft(scale * z)[:n].real


def fgn_series(n: int, h: float, seed: SeedSpec) -> ReturnSeries:
    return ReturnSeries(fgn_array(n, h, seed))
