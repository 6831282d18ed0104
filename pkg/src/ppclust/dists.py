"""Exact discrete count distributions and a convex-order checker.

These laws serve as replication kernels for perturbed lattices and cluster
processes, and as subjects of the convex-order (cx) comparisons that separate
sub-Poisson from super-Poisson clustering. The cx checker works through the
stop-loss transform E(X-a)+, which characterizes cx order at equal means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import RandomStream

# Tail mass below which infinite supports are truncated for summation.
DEFAULT_TRUNCATION_TOL = 1e-14
# Hard cap on truncated support length; the laws in play stay far below it.
_MAX_SUPPORT = 10_000_000

_KINDS = (
    "deterministic",
    "binomial",
    "poisson",
    "neg_binomial",
    "geometric",
    "hypergeometric",
    "mixture",
)


@dataclass(frozen=True)
class CountDistribution:
    """A non-negative integer law with exact pmf, mean, and stop-loss.

    Construct via the factory functions below (binomial(), poisson(), ...).
    """

    kind: str
    params: tuple
    truncation_tolerance: float = DEFAULT_TRUNCATION_TOL

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if not (0 < self.truncation_tolerance < 1e-6):
            raise ValueError("truncation_tolerance must be in (0, 1e-6)")
        _validate(self)

    def __repr__(self):
        if self.kind == "mixture":
            weights, components = self.params
            inner = ", ".join(f"{w:g}: {c!r}" for w, c in zip(weights, components))
            return f"mixture({inner})"
        return f"{self.kind}{self.params!r}"


def deterministic(k: int) -> CountDistribution:
    return CountDistribution("deterministic", (int(k),))


def binomial(n: int, p: float) -> CountDistribution:
    return CountDistribution("binomial", (int(n), float(p)))


def poisson(lam: float) -> CountDistribution:
    return CountDistribution("poisson", (float(lam),))


def neg_binomial(r: float, p: float) -> CountDistribution:
    """pmf(i) = C(r+i-1, i) p^i (1-p)^r, mean r p/(1-p)."""
    return CountDistribution("neg_binomial", (float(r), float(p)))


def geometric(p: float) -> CountDistribution:
    """pmf(i) = p (1-p)^i on i >= 0, mean 1/p - 1."""
    return CountDistribution("geometric", (float(p),))


def hypergeometric(n: int, m: int, k: int) -> CountDistribution:
    """Good draws among k taken from n items of which m are good; mean km/n."""
    return CountDistribution("hypergeometric", (int(n), int(m), int(k)))


def mixture(weights, components) -> CountDistribution:
    w = tuple(float(x) for x in weights)
    comps = tuple(components)
    return CountDistribution("mixture", (w, comps))


def _validate(dist: CountDistribution) -> None:
    kind, p = dist.kind, dist.params
    if kind == "deterministic":
        (k,) = p
        if k < 0:
            raise ValueError("deterministic value must be >= 0")
    elif kind == "binomial":
        n, prob = p
        if n < 0:
            raise ValueError("binomial n must be >= 0")
        if not (0.0 <= prob <= 1.0):
            raise ValueError("binomial p must be in [0, 1]")
    elif kind == "poisson":
        (lam,) = p
        if lam < 0:
            raise ValueError("poisson rate must be >= 0")
    elif kind == "neg_binomial":
        r, prob = p
        if r <= 0:
            raise ValueError("neg_binomial r must be > 0")
        if not (0.0 <= prob < 1.0):
            raise ValueError("neg_binomial p must be in [0, 1)")
    elif kind == "geometric":
        (prob,) = p
        if not (0.0 < prob <= 1.0):
            raise ValueError("geometric p must be in (0, 1]")
    elif kind == "hypergeometric":
        n, m, k = p
        if not (0 <= m <= n and 0 <= k <= n):
            raise ValueError("hypergeometric requires 0 <= m, k <= n")
    elif kind == "mixture":
        weights, comps = p
        if len(weights) != len(comps) or not comps:
            raise ValueError("mixture weights/components length mismatch")
        if any(w < 0 for w in weights):
            raise ValueError("mixture weights must be non-negative")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError("mixture weights must sum to 1 within 1e-12")
        for c in comps:
            if not isinstance(c, CountDistribution):
                raise ValueError("mixture components must be CountDistribution")


def pmf(dist: CountDistribution, i: int) -> float:
    """Exact probability mass at integer i >= 0."""
    if i < 0:
        raise ValueError("pmf argument must be >= 0")
    kind, p = dist.kind, dist.params
    if kind == "deterministic":
        return 1.0 if i == p[0] else 0.0
    if kind == "binomial":
        n, prob = p
        if i > n:
            return 0.0
        return math.comb(n, i) * prob**i * (1.0 - prob) ** (n - i)
    if kind == "poisson":
        (lam,) = p
        if lam == 0.0:
            return 1.0 if i == 0 else 0.0
        return math.exp(i * math.log(lam) - lam - math.lgamma(i + 1))
    if kind == "neg_binomial":
        r, prob = p
        if prob == 0.0:
            return 1.0 if i == 0 else 0.0
        log_comb = math.lgamma(r + i) - math.lgamma(r) - math.lgamma(i + 1)
        return math.exp(log_comb + i * math.log(prob) + r * math.log1p(-prob))
    if kind == "geometric":
        (prob,) = p
        return prob * (1.0 - prob) ** i
    if kind == "hypergeometric":
        n, m, k = p
        if i > m or k - i > n - m or i > k:
            return 0.0
        return math.comb(m, i) * math.comb(n - m, k - i) / math.comb(n, k)
    if kind == "mixture":
        weights, comps = p
        return sum(w * pmf(c, i) for w, c in zip(weights, comps))
    raise AssertionError(kind)


def mean(dist: CountDistribution) -> float:
    """Closed-form mean."""
    kind, p = dist.kind, dist.params
    if kind == "deterministic":
        return float(p[0])
    if kind == "binomial":
        n, prob = p
        return n * prob
    if kind == "poisson":
        return p[0]
    if kind == "neg_binomial":
        r, prob = p
        return r * prob / (1.0 - prob)
    if kind == "geometric":
        return 1.0 / p[0] - 1.0
    if kind == "hypergeometric":
        n, m, k = p
        return k * m / n if n > 0 else 0.0
    if kind == "mixture":
        weights, comps = p
        return sum(w * mean(c) for w, c in zip(weights, comps))
    raise AssertionError(kind)


def support_upper(dist: CountDistribution) -> int:
    """Largest integer kept after truncating tail mass below the tolerance."""
    kind, p = dist.kind, dist.params
    if kind == "deterministic":
        return p[0]
    if kind == "binomial":
        return p[0]
    if kind == "hypergeometric":
        n, m, k = p
        return min(m, k)
    if kind == "mixture":
        weights, comps = p
        return max(support_upper(c) for c in comps)
    # Infinite support: walk out until the remaining tail is below tolerance.
    tol = dist.truncation_tolerance
    total = 0.0
    i = 0
    mu = mean(dist)
    while i < _MAX_SUPPORT:
        total += pmf(dist, i)
        if total >= 1.0 - tol and i >= mu:
            return i
        i += 1
    raise RuntimeError("support truncation failed to converge")


def pmf_table(dist: CountDistribution) -> np.ndarray:
    """pmf values on 0..support_upper(dist) as an array."""
    upper = support_upper(dist)
    return np.array([pmf(dist, i) for i in range(upper + 1)])


def stop_loss(dist: CountDistribution, a: float) -> float:
    """Stop-loss transform E(X - a)+ over the truncated support."""
    if a < 0:
        raise ValueError("stop_loss point must be >= 0")
    upper = support_upper(dist)
    start = int(math.floor(a)) + 1 if a == math.floor(a) else int(math.ceil(a))
    return sum((i - a) * pmf(dist, i) for i in range(max(start, 0), upper + 1))


@dataclass(frozen=True)
class CxVerdict:
    """Outcome of a convex-order comparison d1 <=cx d2."""

    status: str  # holds | fails | means_differ
    witness: Optional[float] = None  # smallest violating a when status == fails

    def __bool__(self):
        return self.status == "holds"


# Means farther apart than this cannot be cx-comparable.
MEAN_MATCH_TOL = 1e-9
# Numerical slack allowed on each stop-loss comparison.
CX_SLACK = 1e-12


def check_cx(d1: CountDistribution, d2: CountDistribution) -> CxVerdict:
    """Exact check of d1 <=cx d2 via stop-loss transforms.

    Stop-loss functions of integer-supported laws are piecewise linear with
    knots at the integers, so comparing on the half-integer grid up to the
    truncated support maximum decides the order exactly.
    """
    if abs(mean(d1) - mean(d2)) > MEAN_MATCH_TOL:
        return CxVerdict("means_differ")
    a_max = max(support_upper(d1), support_upper(d2))
    grid = np.arange(0.0, a_max + 0.5, 0.5)
    for a in grid:
        if stop_loss(d1, a) > stop_loss(d2, a) + CX_SLACK:
            return CxVerdict("fails", witness=float(a))
    return CxVerdict("holds")


def sample(dist: CountDistribution, stream: RandomStream) -> int:
    """One draw with the exact law, deterministic per stream."""
    return int(sample_array(dist, 1, stream.generator())[0])


def sample_array(dist: CountDistribution, size: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized draws, used by samplers that need one count per site."""
    kind, p = dist.kind, dist.params
    if kind == "deterministic":
        return np.full(size, p[0], dtype=np.int64)
    if kind == "binomial":
        n, prob = p
        return rng.binomial(n, prob, size=size)
    if kind == "poisson":
        return rng.poisson(p[0], size=size)
    if kind == "neg_binomial":
        # numpy's parameterization counts failures before r successes with
        # success probability q; matching pmfs requires q = 1 - p.
        r, prob = p
        return rng.negative_binomial(r, 1.0 - prob, size=size)
    if kind == "geometric":
        return rng.geometric(p[0], size=size) - 1
    if kind == "hypergeometric":
        n, m, k = p
        return rng.hypergeometric(m, n - m, k, size=size)
    if kind == "mixture":
        weights, comps = p
        choice = rng.choice(len(comps), size=size, p=np.array(weights))
        out = np.zeros(size, dtype=np.int64)
        for j, comp in enumerate(comps):
            mask = choice == j
            cnt = int(mask.sum())
            if cnt:
                out[mask] = sample_array(comp, cnt, rng)
        return out
    raise AssertionError(kind)
