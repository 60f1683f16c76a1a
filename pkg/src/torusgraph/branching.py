"""Branching-process oracles and simulators.

Total progeny of a Poisson(lambda') Galton-Watson tree follows the
Borel distribution; its tail is the analytic oracle against which the
simulators are checked.  The multi-type process B1(x) (offspring count
Po(lambda * x * EW), child types i.i.d. size-biased W) and the
homogeneous compound-Poisson process B2 have identical total-progeny
laws when B1's root type is itself size-biased, which is what links the
weighted graph to a scalar survival criterion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import binom, poisson

from .errors import RegimeError
from .model import WeightSpec


class _Exceeded:
    """Sentinel: the simulated tree outgrew the abandonment cap."""

    def __repr__(self) -> str:
        return "EXCEEDED"


EXCEEDED = _Exceeded()


@dataclass(frozen=True)
class ProgenyDistribution:
    """Total-progeny (Borel) law of a Poisson(intensity) GW process."""

    intensity: float
    cap: int = 1_000_000

    def tail(self, k: int) -> float:
        return borel_tail(self.intensity, k)

    def sample(self, rng: np.random.Generator):
        return simulate_poisson_gw(self.intensity, self.cap, rng)


def borel_tail(lambda_prime: float, k: int) -> float:
    """P{total progeny >= k} for offspring law Po(lambda'), lambda' < 1.

    Sums e^{-lambda' j} (lambda' j)^{j-1} / j! from j = k; terms decay
    like e^{-alpha j} with alpha = lambda' - 1 - log lambda', so the
    truncation error is below 1e-12 at the stopping rule used here.
    """
    if not 0 < lambda_prime < 1:
        raise RegimeError(f"Borel tail needs lambda' in (0,1), got {lambda_prime}")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return 1.0
    alpha = lambda_prime - 1.0 - math.log(lambda_prime)
    log_lp = math.log(lambda_prime)
    total = 0.0
    j = k
    j_min_extra = k + int(50.0 / alpha) + 1
    while True:
        log_term = -lambda_prime * j + (j - 1) * (log_lp + math.log(j)) - gammaln(j + 1)
        term = math.exp(log_term)
        total += term
        j += 1
        if term < 1e-16 * total and j > j_min_extra:
            break
    return min(total, 1.0)


def borel_tail_asymptotic(lambda_prime: float, k: int) -> float:
    """Leading-order tail: the point mass at j decays like
    e^{-alpha j} j^{-3/2} / (sqrt(2 pi) lambda'); the tail sums that
    expression from j = k.  A single term underestimates the tail by up
    to 1/(1 - e^{-alpha}), so the sum is carried out numerically (it is
    effectively geometric with ~1/alpha relevant terms)."""
    alpha = lambda_prime - 1.0 - math.log(lambda_prime)
    pref = 1.0 / (math.sqrt(2 * math.pi) * lambda_prime)
    total = 0.0
    j = k
    j_min = k + int(50.0 / alpha) + 1
    while True:
        term = pref * math.exp(-alpha * j) / j**1.5
        total += term
        j += 1
        if term < 1e-16 * total and j > j_min:
            return total


def simulate_poisson_gw(lambda_prime: float, cap: int, rng: np.random.Generator):
    """Total progeny of one Poisson(lambda') GW tree, or EXCEEDED.

    Generation sums of i.i.d. Poisson variables collapse to a single
    Poisson draw per generation.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if lambda_prime < 0:
        raise ValueError("intensity must be nonnegative")
    total = 1
    frontier = 1
    while frontier:
        frontier = int(rng.poisson(lambda_prime * frontier))
        total += frontier
        if total > cap:
            return EXCEEDED
    return total


def poisson_gw_progeny_batch(lambda_prime: float, n: int, cap: int,
                             rng: np.random.Generator) -> np.ndarray:
    """Total progeny of n independent Poisson(lambda') GW trees.

    Uses the random-walk representation: with i.i.d. offspring draws
    X_1, X_2, ..., tree boundaries are the successive first-passage
    times of cumsum(X - 1) through -1, -2, ...; abandoning a tree once
    it consumes more than `cap` draws leaves the remaining stream fresh.
    Returns an int64 array with -1 marking abandoned (EXCEEDED) trees.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    out = np.empty(n, dtype=np.int64)
    filled = 0
    g_last = 0          # walk value at the end of the consumed stream
    m_last = 0          # walk value at the last tree boundary
    since_boundary = 0  # draws consumed by the current (incomplete) tree
    mean_size = 1.0 / max(1.0 - lambda_prime, 1e-3)
    while filled < n:
        chunk = int(min(max((n - filled) * mean_size * 1.3 + 4096, 8192), 2**24))
        x = rng.poisson(lambda_prime, size=chunk)
        c = g_last + np.cumsum(x - 1, dtype=np.int64)
        mins = np.minimum.accumulate(np.minimum(c, m_last))
        prev = np.concatenate(([m_last], mins[:-1]))
        bnd = np.flatnonzero(mins < prev)
        prev_b = -1  # chunk-local index of the previous boundary
        for b in bnd:
            size = since_boundary + (b - prev_b)
            out[filled] = size if size <= cap else -1
            filled += 1
            since_boundary = 0
            prev_b = b
            if filled == n:
                return out
        since_boundary += chunk - 1 - prev_b
        g_last = int(c[-1])
        m_last = int(mins[-1])
        if since_boundary > cap:
            out[filled] = -1
            filled += 1
            since_boundary = 0
            m_last = g_last  # restart level tracking below the current walk value
    return out


@dataclass
class SizeBiasedSpec:
    """Size-biased companion of a weight distribution:
    mass d mu(y) reweighted to y d mu(y) / E W."""

    base: WeightSpec
    dist: WeightSpec

    @property
    def mean(self) -> float:
        return self.dist.mean

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.dist.sample(n, rng)


def size_biased(w: WeightSpec) -> SizeBiasedSpec:
    """Exact reweighting for discrete kinds, quadrature for continuous."""
    cached = getattr(w, "_size_biased_cache", None)
    if cached is not None:
        return cached
    M = w.mean
    if M <= 0:
        raise ValueError("size biasing needs E W > 0")
    if w.kind == "constant":
        dist = WeightSpec.constant(w.support_bound)
    elif w.kind == "discrete":
        values = w._data["values"]
        probs = values * w._data["probs"] / M
        dist = WeightSpec.discrete(values, probs)
    else:
        base_pdf = w._data["pdf"]
        lo, hi = w._data["lo"], w._data["hi"]

        def pdf(y):
            return np.asarray(y) * base_pdf(y) / M

        dist = WeightSpec.continuous(pdf, lo, hi, n_nodes=len(w._nodes))
    spec = SizeBiasedSpec(base=w, dist=dist)
    w._size_biased_cache = spec
    return spec


def simulate_B1(x: float, lam: float, w: WeightSpec, cap: int,
                rng: np.random.Generator):
    """Total progeny of the multi-type process started from type x.

    A type-t individual begets Po(lam * t * EW) children whose types
    are i.i.d. size-biased W; that two-step draw realizes the intensity
    measure lam * t * y dmu(y) without discretizing the type space.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if x < 0:
        raise ValueError("type must be nonnegative")
    tilde = size_biased(w).dist
    M = w.mean
    total = 1
    k = int(rng.poisson(lam * x * M))
    types = tilde.sample(k, rng)
    while types.size:
        total += types.size
        if total > cap:
            return EXCEEDED
        counts = rng.poisson(lam * M * types)
        types = tilde.sample(int(counts.sum()), rng)
    return total


def simulate_B2(lam: float, w: WeightSpec, cap: int, rng: np.random.Generator):
    """Total progeny of the homogeneous compound-Poisson process: each
    individual's offspring count is Po(lam * EW * Wtilde) with a fresh
    size-biased Wtilde per individual.  Mean offspring = lam * E W^2."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    tilde = size_biased(w).dist
    M = w.mean
    total = 1
    frontier = 1
    while frontier:
        wt = tilde.sample(frontier, rng)
        frontier = int(rng.poisson(lam * M * wt).sum())
        total += frontier
        if total > cap:
            return EXCEEDED
    return total


def binomial_poisson_tv(n: int, lam: float) -> float:
    """Exact total-variation distance between Bin(n, lam/n) and Po(lam).

    The coupling bound P(X != Y) <= lam^2 / n dominates it; asserted
    here so every call re-certifies the inequality.
    """
    if lam < 0 or lam > n:
        raise ValueError(f"need 0 <= lambda <= n, got lambda={lam}, n={n}")
    if lam == 0:
        return 0.0
    k = np.arange(0, n + 1)
    b = binom.pmf(k, n, lam / n)
    q = poisson.pmf(k, lam)
    tv = 0.5 * (np.abs(b - q).sum() + poisson.sf(n, lam))
    assert tv <= lam * lam / n + 1e-12, (tv, lam * lam / n)
    return float(tv)
