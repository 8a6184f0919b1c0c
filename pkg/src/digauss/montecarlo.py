"""Seeded, chunk-parallel estimation of miss and false identification rates.

Every estimate carries an exact analytic oracle.  Both error events depend on
the received block only through its L scalar components along the tested
word's layer directions, and those components are independent unit normals
around known means, so the oracle is a finite product of normal CDF values:

* miss:  1 - prod_l (1 - 2*Phi(-tau_l/sigma))
* false: prod_l [Phi((r_l+tau_l-mu_l)/sigma) - Phi((r_l-tau_l-mu_l)/sigma)]
  with mu_l the sent leaf's component along the tested word's layer-l direction

Trials are split into fixed 4096-trial chunks; chunk k draws from a substream
derived from (seed, k), and the reduction is an integer sum, so the hit count
is identical for any worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from multiprocessing import Pool
from typing import NamedTuple

import numpy as np

from .channel import RngSeed, make_rng, phi, substream
from .codebook import Codebook, first_differing_layer
from .errors import DomainError, SameWord
from .geometry import as_vector  # noqa: F401  (re-exported convenience)

CHUNK_TRIALS = 4096

WILSON_Z = 1.96


def wilson_interval(hits: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    """95% Wilson score interval; stays sane at zero or full hit counts."""
    if trials < 1:
        raise DomainError("trials must be at least 1")
    if not 0 <= hits <= trials:
        raise DomainError("hits must lie in [0, trials]")
    p = hits / trials
    zz = z * z
    denom = 1.0 + zz / trials
    center = (p + zz / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + zz / (4.0 * trials * trials)) / denom
    # At the extremes the exact endpoint is 0 or 1; rounding must not pull the
    # interval off the point estimate.
    low = 0.0 if hits == 0 else max(0.0, center - half)
    high = 1.0 if hits == trials else min(1.0, center + half)
    return (low, high)


@dataclass(frozen=True)
class TrialReport:
    """Monte Carlo estimate with its 95% Wilson interval and analytic oracle."""

    trials: int
    hits: int
    estimate: float
    ci_low: float
    ci_high: float
    analytic: float | None
    seed: RngSeed
    bound: float | None = None

    def __post_init__(self):
        if not 0 <= self.hits <= self.trials:
            raise DomainError("hits must lie in [0, trials]")
        if self.estimate != self.hits / self.trials:
            raise DomainError("estimate must equal hits/trials")
        if not self.ci_low <= self.estimate <= self.ci_high:
            raise DomainError("estimate must lie inside its confidence interval")

    @property
    def covers_analytic(self) -> bool:
        if self.analytic is None:
            return False
        return self.ci_low <= self.analytic <= self.ci_high


@dataclass(frozen=True)
class PairKind:
    """Same word, or ordered pair first differing at a given layer."""

    differs_at: int | None

    @property
    def label(self) -> str:
        if self.differs_at is None:
            return "same_word"
        return f"differ_at_layer_{self.differs_at}"


@dataclass(frozen=True, eq=False)
class PairEntry:
    kind: PairKind
    tested: int
    sent: int | None
    report: TrialReport


@dataclass(frozen=True, eq=False)
class AllPairsResult:
    entries: tuple[PairEntry, ...]
    lambda1_hat: float
    lambda2_hat: float


class _Kernel(NamedTuple):
    mode: str
    count_accept: bool
    mu: np.ndarray
    radii: np.ndarray
    taus: np.ndarray
    sigma: float
    leaf: np.ndarray | None
    dirs: np.ndarray | None


def _chunk_hits(args) -> int:
    kernel, seed, size = args
    rng = make_rng(seed)
    if kernel.mode == "scalar_fast":
        stats = kernel.mu + kernel.sigma * rng.standard_normal((size, kernel.mu.size))
    else:
        noise = rng.standard_normal((size, kernel.leaf.size))
        received = kernel.leaf + kernel.sigma * noise
        stats = received @ kernel.dirs.T
    accepted = np.all(np.abs(stats - kernel.radii) <= kernel.taus, axis=1)
    count = int(np.count_nonzero(accepted))
    return count if kernel.count_accept else size - count


def _run_chunks(kernel: _Kernel, trials: int, seed: RngSeed, workers: int) -> int:
    jobs = []
    done = 0
    index = 0
    while done < trials:
        size = min(CHUNK_TRIALS, trials - done)
        jobs.append((kernel, substream(seed, index), size))
        done += size
        index += 1
    if workers <= 1 or len(jobs) == 1:
        return sum(_chunk_hits(j) for j in jobs)
    with Pool(processes=workers) as pool:
        return sum(pool.map(_chunk_hits, jobs, chunksize=4))


def _as_rngseed(seed: int | RngSeed) -> RngSeed:
    return seed if isinstance(seed, RngSeed) else RngSeed(int(seed), 0)


def _resolve_sigma(code: Codebook, sigma: float | None) -> float:
    if sigma is None:
        if code.channel is None:
            raise DomainError("sigma is required for codebooks built without a channel")
        sigma = code.channel.sigma
    if not sigma > 0:
        raise DomainError("sigma must be positive for error estimation")
    return float(sigma)


def _check_mode(mode: str) -> None:
    if mode not in ("scalar_fast", "full_vector"):
        raise DomainError(f"unknown simulation mode {mode!r}")


def miss_analytic(thresholds, sigma: float) -> float:
    """Exact miss probability 1 - prod_l (1 - 2*Phi(-tau_l/sigma))."""
    keep = 1.0
    for tau in thresholds:
        keep *= 1.0 - 2.0 * phi(-tau / sigma)
    return 1.0 - keep


def false_analytic(mu, radii, thresholds, sigma: float) -> float:
    """Exact acceptance probability of another word's decoder, layer product form."""
    prob = 1.0
    for m, r, tau in zip(mu, radii, thresholds):
        prob *= phi((r + tau - m) / sigma) - phi((r - tau - m) / sigma)
    return prob


def estimate_miss(
    code: Codebook,
    word_id: int,
    sigma: float | None = None,
    trials: int = 100_000,
    seed: int | RngSeed = 0,
    mode: str = "scalar_fast",
    workers: int = 1,
) -> TrialReport:
    """Estimate P(own decoder rejects) for one word under noise level sigma."""
    if trials < 1:
        raise DomainError("trials must be at least 1")
    _check_mode(mode)
    sigma = _resolve_sigma(code, sigma)
    word = code.word(word_id)
    dirs = np.stack(word.directions)
    mu = dirs @ word.vector
    radii = np.array(word.radii)
    taus = np.array(word.thresholds)
    kernel = _Kernel(
        mode=mode,
        count_accept=False,
        mu=mu,
        radii=radii,
        taus=taus,
        sigma=sigma,
        leaf=word.vector if mode == "full_vector" else None,
        dirs=dirs if mode == "full_vector" else None,
    )
    base = _as_rngseed(seed)
    hits = _run_chunks(kernel, trials, base, workers)
    low, high = wilson_interval(hits, trials)
    analytic = miss_analytic(word.thresholds, sigma)
    union_bound = sum(2.0 * phi(-tau / sigma) for tau in word.thresholds)
    return TrialReport(
        trials=trials,
        hits=hits,
        estimate=hits / trials,
        ci_low=low,
        ci_high=high,
        analytic=analytic,
        seed=base,
        bound=union_bound,
    )


def estimate_false(
    code: Codebook,
    tested_id: int,
    sent_id: int,
    sigma: float | None = None,
    trials: int = 100_000,
    seed: int | RngSeed = 0,
    mode: str = "scalar_fast",
    workers: int = 1,
) -> TrialReport:
    """Estimate P(tested word's decoder accepts | sent word transmitted)."""
    if trials < 1:
        raise DomainError("trials must be at least 1")
    _check_mode(mode)
    sigma = _resolve_sigma(code, sigma)
    tested = code.word(tested_id)
    sent = code.word(sent_id)
    if tested_id == sent_id:
        raise SameWord("false identification needs two distinct words")
    dirs = np.stack(tested.directions)
    mu = dirs @ sent.vector
    radii = np.array(tested.radii)
    taus = np.array(tested.thresholds)
    kernel = _Kernel(
        mode=mode,
        count_accept=True,
        mu=mu,
        radii=radii,
        taus=taus,
        sigma=sigma,
        leaf=sent.vector if mode == "full_vector" else None,
        dirs=dirs if mode == "full_vector" else None,
    )
    base = _as_rngseed(seed)
    hits = _run_chunks(kernel, trials, base, workers)
    low, high = wilson_interval(hits, trials)
    analytic = false_analytic(mu, tested.radii, tested.thresholds, sigma)
    layer = first_differing_layer(code, tested_id, sent_id)
    separation = abs(float(mu[layer - 1]) - tested.radii[layer - 1])
    tail_bound = 2.0 * phi(-(separation - tested.thresholds[layer - 1]) / sigma)
    return TrialReport(
        trials=trials,
        hits=hits,
        estimate=hits / trials,
        ci_low=low,
        ci_high=high,
        analytic=analytic,
        seed=base,
        bound=tail_bound,
    )


def estimate_all_pairs(
    code: Codebook,
    sigma: float | None = None,
    trials_per_pair: int = 10_000,
    seed: int | RngSeed = 0,
    mode: str = "scalar_fast",
    workers: int = 1,
    max_words: int | None = None,
) -> AllPairsResult:
    """Miss report per sampled word, false report per sampled ordered pair.

    Report r uses the r-th substream of the base seed, so the full result is
    reproducible from (codebook, sigma, trials, seed) alone.
    """
    word_ids = list(range(len(code.words)))
    if max_words is not None:
        word_ids = word_ids[:max_words]
    if len(word_ids) < 2:
        raise DomainError("need at least two words for a pair sweep")
    base = _as_rngseed(seed)
    entries: list[PairEntry] = []
    stream_index = 0
    for wid in word_ids:
        rep = estimate_miss(
            code, wid, sigma=sigma, trials=trials_per_pair,
            seed=substream(base, stream_index), mode=mode, workers=workers,
        )
        entries.append(PairEntry(kind=PairKind(None), tested=wid, sent=None, report=rep))
        stream_index += 1
    for tested_id in word_ids:
        for sent_id in word_ids:
            if tested_id == sent_id:
                continue
            rep = estimate_false(
                code, tested_id, sent_id, sigma=sigma, trials=trials_per_pair,
                seed=substream(base, stream_index), mode=mode, workers=workers,
            )
            layer = first_differing_layer(code, tested_id, sent_id)
            entries.append(
                PairEntry(kind=PairKind(layer), tested=tested_id, sent=sent_id, report=rep)
            )
            stream_index += 1
    lambda1 = max(e.report.estimate for e in entries if e.kind.differs_at is None)
    lambda2 = max(e.report.estimate for e in entries if e.kind.differs_at is not None)
    return AllPairsResult(entries=tuple(entries), lambda1_hat=lambda1, lambda2_hat=lambda2)


def empirical_rate(layer_counts, n: int) -> float:
    """sum_l log2(count_l) divided by n*log2(n)."""
    if n < 2:
        raise DomainError("empirical rate needs block length n >= 2")
    counts = [int(k) for k in layer_counts]
    if not counts or any(k < 1 for k in counts):
        raise DomainError("layer counts must be positive integers")
    return sum(math.log2(k) for k in counts) / (n * math.log2(n))
