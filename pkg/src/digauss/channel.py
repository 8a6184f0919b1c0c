"""AWGN channel simulation, the standard normal CDF, and the projection tail law.

Randomness is counter-based (Philox) keyed by an explicit (seed, stream) pair,
so any draw is reproducible from the pair alone and distinct streams are
independent.  ``substream`` derives child streams with a splitmix-style mix,
which is how the Monte Carlo layer gets worker-count-independent chunking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError

_U64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

_SQRT2 = math.sqrt(2.0)
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


@dataclass(frozen=True)
class ChannelParams:
    """Block length n, noise standard deviation sigma, and power budget."""

    n: int
    sigma: float
    power: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("block length n must be at least 1")
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")
        if not self.power > 0:
            raise DomainError("power must be positive")


@dataclass(frozen=True)
class RngSeed:
    """A (seed, stream) pair; together they fully determine a random stream."""

    seed: int
    stream: int = 0


def _mix64(x: int) -> int:
    """splitmix64 finalizer: a bijective 64-bit scramble."""
    x = (x + _GOLDEN) & _U64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _U64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _U64
    x ^= x >> 31
    return x


def substream(seed: RngSeed, index: int) -> RngSeed:
    """Child stream number ``index`` of ``seed``; deterministic and collision-resistant."""
    if index < 0:
        raise DomainError("substream index must be non-negative")
    mixed = _mix64((seed.stream & _U64) ^ _mix64(index + 1))
    return RngSeed(seed.seed, mixed)


def make_rng(seed: RngSeed | int, stream: int = 0) -> np.random.Generator:
    """Philox generator keyed by (seed, stream)."""
    if isinstance(seed, RngSeed):
        key = (seed.seed & _U64, seed.stream & _U64)
    else:
        key = (int(seed) & _U64, stream & _U64)
    return np.random.Generator(np.random.Philox(key=np.array(key, dtype=np.uint64)))


def transmit(x: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """One channel use block: y = x + sigma * z, z iid standard normal.

    sigma = 0 is the noiseless identity channel and consumes no randomness.
    """
    if sigma < 0:
        raise DomainError("sigma must be non-negative")
    if not np.all(np.isfinite(x)):
        raise DomainError("input block must be finite")
    if sigma == 0:
        return np.array(x, dtype=np.float64, copy=True)
    return x + sigma * rng.standard_normal(x.shape[-1])


def phi(x: float) -> float:
    """Standard normal CDF via the complementary error function.

    Absolute error is far below 1e-12 over the whole real line; the erfc route
    keeps relative accuracy in the deep tail (arguments down to ~ -37) where a
    quadrature or series around zero would lose everything to cancellation.
    """
    return 0.5 * math.erfc(-float(x) / _SQRT2)


class TailBound(NamedTuple):
    exact: float
    mills_bound: float


def projection_tail(x: float) -> TailBound:
    """P(|<Z, u>| >= x) for a unit direction u: exactly 2*Phi(-x), with Mill's bound.

    The bound is sqrt(2/pi) * (1/x) * exp(-x^2/2) and dominates the exact value
    for every x > 0.  (Half this constant appears in some statements of the
    law; that version is false already at x = 2.)
    """
    if not x > 0:
        raise DomainError("projection tail is defined for x > 0")
    exact = 2.0 * phi(-x)
    mills = _SQRT_2_OVER_PI * math.exp(-0.5 * x * x) / x
    return TailBound(exact=exact, mills_bound=mills)
