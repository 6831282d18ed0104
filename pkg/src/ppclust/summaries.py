"""Monte Carlo summary statistics for point-process samplers.

Every estimator here follows the same protocol: draw ``reps`` independent
patterns from a generator specification (replication ``i`` uses
``stream.derive(i)``, so runs are reproducible and order-independent),
compute a per-replication statistic, and report the across-replication
mean with its standard error.  Curve-valued statistics evaluate all
abscissa values on the same replications, so neighbouring estimates share
noise but each is individually unbiased.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    PointPattern,
    RandomStream,
    Window,
    ball_volume,
    pairwise_distances,
    run_indexed,
    unit_ball_volume,
    volume,
)
from .procgen import GeneratorSpec, sample

__all__ = [
    "EstimateWithError",
    "CurveEstimate",
    "Region",
    "ball",
    "box",
    "close_pair_count",
    "ripley_k",
    "pair_correlation",
    "void_probability",
    "factorial_moment",
    "laplace_functional",
    "count_variance",
    "curve_to_csv",
    "indicator_function",
]

DEFAULT_BANDWIDTH_FRACTION = 0.15
MAX_FACTORIAL_ORDER = 4
# Above this exponent, exp() overflows double precision; the Laplace
# estimator switches to log-space accumulation before that point.
_EXP_DIRECT_LIMIT = 680.0


@dataclass(frozen=True)
class EstimateWithError:
    """A scalar Monte Carlo estimate with its standard error."""

    value: float
    std_error: float
    replications: int


@dataclass(frozen=True)
class CurveEstimate:
    """A function estimate on a fixed grid of abscissa values."""

    abscissa: tuple
    estimates: tuple  # of EstimateWithError, aligned with abscissa

    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.estimates])

    def std_errors(self) -> np.ndarray:
        return np.array([e.std_error for e in self.estimates])


@dataclass(frozen=True)
class Region:
    """A test region shape: a ball of given radius or an axis-aligned box
    of given side length, both placed by their centre point."""

    kind: str
    size: float

    def __post_init__(self):
        if self.kind not in ("ball", "box"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        if not self.size > 0:
            raise ValueError("region size must be positive")

    def volume(self, dim: int) -> float:
        if self.kind == "ball":
            return ball_volume(self.size, dim)
        return self.size**dim

    def max_extent(self) -> float:
        """Diameter along any axis, used to check the region fits."""
        return 2.0 * self.size if self.kind == "ball" else self.size


def ball(radius: float) -> Region:
    return Region("ball", float(radius))


def box(side: float) -> Region:
    return Region("box", float(side))


# ---------------------------------------------------------------------------
# Shared helpers


def _check_grid(r_grid, w: Window, pad: float = 0.0) -> np.ndarray:
    grid = np.asarray(r_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("r_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("r_grid must be strictly increasing")
    if grid[0] < 0:
        raise ValueError("r_grid values must be non-negative")
    half_side = float(np.min(w.sides)) / 2.0
    if grid[-1] + pad >= half_side:
        raise ValueError(
            f"max scale {grid[-1] + pad:g} must stay below half the smallest "
            f"window side ({half_side:g}) for periodic distances to be valid"
        )
    return grid


def _require_periodic(w: Window, what: str):
    if w.metric != "periodic":
        raise ValueError(f"{what} requires a periodic window (edge-effect free)")


def _mean_and_se(values: np.ndarray) -> tuple:
    n = values.shape[0]
    mean = float(np.mean(values, axis=0)) if values.ndim == 1 else np.mean(values, axis=0)
    if n < 2:
        se = 0.0 if values.ndim == 1 else np.zeros(values.shape[1])
    else:
        se = np.std(values, axis=0, ddof=1) / math.sqrt(n)
        if values.ndim == 1:
            se = float(se)
    return mean, se


def _pair_distances(pattern: PointPattern) -> np.ndarray:
    """Unordered pair distances as a flat vector."""
    n = pattern.points.shape[0]
    if n < 2:
        return np.empty(0)
    dm = pairwise_distances(pattern.points, pattern.window)
    iu = np.triu_indices(n, k=1)
    return dm[iu]


def close_pair_count(pattern: PointPattern, r: float) -> int:
    """Number of ordered pairs of distinct points at distance <= r."""
    d = _pair_distances(pattern)
    return 2 * int(np.count_nonzero(d <= r))


def _random_centers(w: Window, placements: int, rng) -> np.ndarray:
    return w.lower + rng.random((placements, w.dim)) * w.sides


def _counts_in_regions(pattern: PointPattern, centers: np.ndarray, region: Region) -> np.ndarray:
    """Number of pattern points inside the region placed at each centre."""
    pts = pattern.points
    if pts.shape[0] == 0:
        return np.zeros(centers.shape[0], dtype=np.int64)
    delta = np.abs(centers[:, None, :] - pts[None, :, :])
    if pattern.window.metric == "periodic":
        delta = np.minimum(delta, pattern.window.sides - delta)
    if region.kind == "ball":
        inside = np.sum(delta**2, axis=2) <= region.size**2
    else:
        inside = np.all(delta <= region.size / 2.0, axis=2)
    return np.count_nonzero(inside, axis=1).astype(np.int64)


def _region_fits(region: Region, w: Window):
    if region.max_extent() > float(np.min(w.sides)):
        raise ValueError(
            f"region extent {region.max_extent():g} exceeds the smallest "
            f"window side {float(np.min(w.sides)):g}"
        )


# ---------------------------------------------------------------------------
# Second-order statistics


def ripley_k(
    spec: GeneratorSpec,
    w: Window,
    r_grid,
    reps: int = 100,
    stream: RandomStream = None,
    threads: int = 1,
) -> CurveEstimate:
    """Estimate the reduced second moment function K(r).

    For each replication the ordered pairs at distance <= r are counted and
    scaled by 1/(lambda^2 |W|) with the intensity pooled across replications;
    for a Poisson process the result approaches kappa_d r^d.  Empty
    replications carry no pairs and are skipped (an error is raised if more
    than half are empty, since the estimate would then be meaningless).
    """
    _require_periodic(w, "ripley_k")
    grid = _check_grid(r_grid, w)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if stream is None:
        raise ValueError("an explicit RandomStream is required")

    def one(i: int):
        pattern = sample(spec, w, stream.derive(i))
        n = pattern.points.shape[0]
        if n == 0:
            return None
        dists = np.sort(_pair_distances(pattern))
        counts = 2.0 * np.searchsorted(dists, grid, side="right")
        return n, counts

    results = run_indexed(reps, one, threads)
    used = [r for r in results if r is not None]
    empties = reps - len(used)
    if empties * 2 > reps:
        raise ValueError(
            f"{empties} of {reps} replications were empty; the generator is "
            "too sparse for this window"
        )
    volume_w = volume(w)
    total_points = sum(n for n, _ in used)
    lam_hat = total_points / (len(used) * volume_w)
    per_rep = np.array([counts / (lam_hat**2 * volume_w) for _, counts in used])
    mean, se = _mean_and_se(per_rep)
    ests = tuple(
        EstimateWithError(float(m), float(s), len(used)) for m, s in zip(mean, np.atleast_1d(se))
    )
    return CurveEstimate(tuple(float(r) for r in grid), ests)


def pair_correlation(
    spec: GeneratorSpec,
    w: Window,
    r_grid,
    bandwidth: float = None,
    reps: int = 100,
    stream: RandomStream = None,
    threads: int = 1,
) -> CurveEstimate:
    """Kernel estimate of the pair correlation function g(r).

    Ordered pair distances are smoothed with an Epanechnikov kernel and
    normalised by the spherical surface measure d kappa_d r^(d-1), so a
    Poisson process gives g = 1 at every scale.  The default bandwidth is
    0.15 times the largest grid value.
    """
    _require_periodic(w, "pair_correlation")
    if stream is None:
        raise ValueError("an explicit RandomStream is required")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    pre_grid = np.asarray(r_grid, dtype=float)
    if pre_grid.size and np.any(pre_grid == 0.0):
        raise ValueError("r=0 is not estimable: the surface factor vanishes there")
    if bandwidth is None:
        bandwidth = DEFAULT_BANDWIDTH_FRACTION * float(np.max(pre_grid))
    if not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    grid = _check_grid(r_grid, w, pad=bandwidth)
    d = w.dim
    surface = d * unit_ball_volume(d) * grid ** (d - 1)

    def one(i: int):
        pattern = sample(spec, w, stream.derive(i))
        n = pattern.points.shape[0]
        dists = _pair_distances(pattern)
        if dists.size == 0:
            return n, np.zeros(grid.size)
        u = (grid[:, None] - dists[None, :]) / bandwidth
        kern = np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u**2) / bandwidth, 0.0)
        return n, 2.0 * np.sum(kern, axis=1)

    results = run_indexed(reps, one, threads)
    volume_w = volume(w)
    lam_hat = sum(n for n, _ in results) / (reps * volume_w)
    if lam_hat == 0:
        raise ValueError("all replications were empty")
    per_rep = np.array([s / (lam_hat**2 * volume_w * surface) for _, s in results])
    mean, se = _mean_and_se(per_rep)
    ests = tuple(
        EstimateWithError(float(m), float(s), reps) for m, s in zip(mean, np.atleast_1d(se))
    )
    return CurveEstimate(tuple(float(r) for r in grid), ests)


# ---------------------------------------------------------------------------
# Region-sampling statistics


def void_probability(
    spec: GeneratorSpec,
    w: Window,
    region: Region,
    placements: int = 64,
    reps: int = 100,
    stream: RandomStream = None,
    threads: int = 1,
) -> EstimateWithError:
    """Probability that the region, uniformly placed, contains no points.

    Each replication averages the empty indicator over independently placed
    regions; the standard error is taken across replications, which keeps it
    honest about the within-pattern correlation of overlapping placements.
    """
    _region_fits(region, w)
    _require_periodic(w, "void_probability")
    if placements < 1 or reps < 1:
        raise ValueError("placements and reps must be >= 1")
    if stream is None:
        raise ValueError("an explicit RandomStream is required")

    def one(i: int) -> float:
        rep = stream.derive(i)
        pattern = sample(spec, w, rep.derive(0))
        centers = _random_centers(w, placements, rep.derive(1).generator())
        counts = _counts_in_regions(pattern, centers, region)
        return float(np.mean(counts == 0))

    per_rep = np.array(run_indexed(reps, one, threads))
    mean, se = _mean_and_se(per_rep)
    return EstimateWithError(mean, se, reps)


def factorial_moment(
    spec: GeneratorSpec,
    w: Window,
    box_side: float,
    k: int,
    placements: int = 64,
    reps: int = 100,
    stream: RandomStream = None,
    threads: int = 1,
) -> EstimateWithError:
    """k-th factorial moment E[N(N-1)...(N-k+1)] of the count in a box.

    The box of the given side is placed uniformly; k is limited to 4 because
    higher falling factorials are numerically dominated by rare large counts.
    """
    if not 1 <= k <= MAX_FACTORIAL_ORDER:
        raise ValueError(f"k must be between 1 and {MAX_FACTORIAL_ORDER}")
    region = box(box_side)
    _region_fits(region, w)
    _require_periodic(w, "factorial_moment")
    if placements < 1 or reps < 1:
        raise ValueError("placements and reps must be >= 1")
    if stream is None:
        raise ValueError("an explicit RandomStream is required")

    def one(i: int) -> float:
        rep = stream.derive(i)
        pattern = sample(spec, w, rep.derive(0))
        centers = _random_centers(w, placements, rep.derive(1).generator())
        counts = _counts_in_regions(pattern, centers, region).astype(float)
        stat = np.ones_like(counts)
        for j in range(k):
            stat = stat * (counts - j)
        return float(np.mean(stat))

    per_rep = np.array(run_indexed(reps, one, threads))
    mean, se = _mean_and_se(per_rep)
    return EstimateWithError(mean, se, reps)


def count_variance(
    spec: GeneratorSpec,
    w: Window,
    box_side: float,
    placements: int = 64,
    reps: int = 100,
    stream: RandomStream = None,
    threads: int = 1,
) -> EstimateWithError:
    """Variance of the count in a uniformly placed box.

    Combines the within-replication sample variance with the variance of the
    per-replication means by the law of total variance, so placements inside
    one pattern and pattern-to-pattern fluctuation both contribute.  The
    standard error comes from a leave-one-replication-out jackknife.
    """
    region = box(box_side)
    _region_fits(region, w)
    _require_periodic(w, "count_variance")
    if placements < 1 or reps < 2:
        raise ValueError("placements must be >= 1 and reps >= 2")
    if stream is None:
        raise ValueError("an explicit RandomStream is required")

    def one(i: int):
        rep = stream.derive(i)
        pattern = sample(spec, w, rep.derive(0))
        centers = _random_centers(w, placements, rep.derive(1).generator())
        counts = _counts_in_regions(pattern, centers, region).astype(float)
        m = float(np.mean(counts))
        v = float(np.var(counts, ddof=1)) if placements > 1 else 0.0
        return m, v

    rows = run_indexed(reps, one, threads)
    means = np.array([m for m, _ in rows])
    wvars = np.array([v for _, v in rows])

    def estimator(ms: np.ndarray, vs: np.ndarray) -> float:
        # E Var(N | pattern) * (1 - 1/placements) + Var of conditional means
        # is unbiased for Var(N): the between-means variance picks up an
        # extra E Var(N | pattern)/placements of placement noise.
        between = float(np.var(ms, ddof=1))
        if placements == 1:
            return between
        return float(np.mean(vs)) * (1.0 - 1.0 / placements) + between

    value = estimator(means, wvars)
    idx = np.arange(reps)
    loo = np.array(
        [estimator(means[idx != i], wvars[idx != i]) for i in range(reps)]
    )
    se = math.sqrt((reps - 1) / reps * float(np.sum((loo - np.mean(loo)) ** 2)))
    return EstimateWithError(value, se, reps)


# ---------------------------------------------------------------------------
# Transform statistics


def laplace_functional(
    spec: GeneratorSpec,
    w: Window,
    f,
    sign: str = "minus",
    reps: int = 100,
    stream: RandomStream = None,
    threads: int = 1,
) -> EstimateWithError:
    """Estimate E[exp(-sum f(x))] (sign="minus") or E[exp(+sum f(x))].

    ``f`` maps an (n, d) array of points to n non-negative values.  The
    "plus" sign grows exponentially in the point count, so accumulation runs
    in log space and an overflow of the final mean is reported as an error
    rather than returned as inf.
    """
    if sign not in ("minus", "plus"):
        raise ValueError("sign must be 'minus' or 'plus'")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if stream is None:
        raise ValueError("an explicit RandomStream is required")

    def one(i: int) -> float:
        pattern = sample(spec, w, stream.derive(i))
        if pattern.points.shape[0] == 0:
            return 0.0
        values = np.asarray(f(pattern.points), dtype=float)
        if values.shape != (pattern.points.shape[0],):
            raise ValueError("f must return one value per point")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValueError("f must be non-negative and finite on the window")
        total = float(np.sum(values))
        return -total if sign == "minus" else total

    exponents = np.array(run_indexed(reps, one, threads))
    if np.max(exponents) < _EXP_DIRECT_LIMIT:
        vals = np.exp(exponents)
        mean, se = _mean_and_se(vals)
        return EstimateWithError(mean, se, reps)
    # Log-space path: log-mean and log-second-moment via stable reductions.
    from scipy.special import logsumexp

    log_mean = float(logsumexp(exponents)) - math.log(reps)
    if log_mean > math.log(np.finfo(float).max):
        raise OverflowError(
            "Laplace functional estimate overflows double precision; "
            "rescale f or use sign='minus'"
        )
    mean = math.exp(log_mean)
    if reps < 2:
        return EstimateWithError(mean, 0.0, reps)
    # Var = m2 - mean^2 in log space: m2 >= mean^2 by Jensen, so the
    # difference is log_m2 + log1p(-exp(2 log_mean - log_m2)).
    log_m2 = float(logsumexp(2.0 * exponents)) - math.log(reps)
    gap = 2.0 * log_mean - log_m2
    if gap >= 0.0:  # numerically equal moments: zero spread
        return EstimateWithError(mean, 0.0, reps)
    log_se = 0.5 * (log_m2 + math.log1p(-math.exp(gap)) - math.log(reps - 1))
    se = math.exp(log_se) if log_se < math.log(np.finfo(float).max) else math.inf
    return EstimateWithError(mean, se, reps)


def indicator_function(lower, upper, height: float = 1.0):
    """Build f(points) = height inside the axis-aligned box, 0 outside.

    A convenient bounded non-negative test function for Laplace functionals:
    for a Poisson process the exact transform is exp(±lambda |B| (e^{∓h}-1))
    with B the box.
    """
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    if lo.shape != hi.shape or lo.ndim != 1 or np.any(lo >= hi):
        raise ValueError("lower and upper must be 1-d with lower < upper")

    def f(points: np.ndarray) -> np.ndarray:
        inside = np.all((points >= lo) & (points < hi), axis=1)
        return np.where(inside, float(height), 0.0)

    return f


# ---------------------------------------------------------------------------
# Serialization


def curve_to_csv(curve: CurveEstimate) -> str:
    """CSV with one row per abscissa: r,estimate,std_error,replications."""
    buf = io.StringIO()
    buf.write("r,estimate,std_error,replications\n")
    for r, est in zip(curve.abscissa, curve.estimates):
        buf.write(
            f"{format(r, '.17g')},{format(est.value, '.17g')},"
            f"{format(est.std_error, '.17g')},{est.replications}\n"
        )
    return buf.getvalue()
