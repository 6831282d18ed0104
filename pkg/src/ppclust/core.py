"""Geometry primitives: windows, metrics, grids, and deterministic random streams.

Everything here is immutable after construction and safe to share across
parallel workers. Stationary statistics default to periodic (torus) windows;
Euclidean windows exist for experiments where wraparound would create
artifacts (crossing probabilities, complexes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Enumeration costs explode in high dimension; boxes only.
MAX_DIMENSION = 8
# Cap on grid_centers output size (cells across all axes combined).
MAX_GRID_CELLS = 1 << 24

METRICS = ("euclidean", "periodic")


def as_point(coords) -> np.ndarray:
    """Coerce coordinates to a finite float vector."""
    p = np.asarray(coords, dtype=float)
    if p.ndim != 1:
        raise ValueError(f"point must be one-dimensional, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite")
    return p


@dataclass(frozen=True, eq=False)
class Window:
    """Axis-aligned box [lower, upper) with a distance metric.

    The half-open convention means grid tilings and lattice restrictions
    never double-count boundary points.
    """

    lower: np.ndarray
    upper: np.ndarray
    metric: str = "periodic"

    def __post_init__(self):
        object.__setattr__(self, "lower", as_point(self.lower))
        object.__setattr__(self, "upper", as_point(self.upper))
        if self.lower.shape != self.upper.shape:
            raise ValueError("window lower/upper dimension mismatch")
        if self.dim < 1 or self.dim > MAX_DIMENSION:
            raise ValueError(f"window dimension must be in [1, {MAX_DIMENSION}]")
        if not np.all(self.lower < self.upper):
            raise ValueError("window requires lower[i] < upper[i] on every axis")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")
        self.lower.setflags(write=False)
        self.upper.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def sides(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Half-open membership test for an (n, d) array of points."""
        pts = np.atleast_2d(points)
        return np.all((pts >= self.lower) & (pts < self.upper), axis=1)

    def wrap(self, points: np.ndarray) -> np.ndarray:
        """Map points onto the torus represented by this window."""
        wrapped = np.mod(points - self.lower, self.sides)
        # mod of a tiny negative offset can round up to the full side length.
        wrapped[wrapped >= self.sides] = 0.0
        return self.lower + wrapped

    def with_metric(self, metric: str) -> "Window":
        return Window(self.lower, self.upper, metric)


def box(*bounds, metric: str = "periodic") -> Window:
    """Window from per-axis (low, high) pairs: box((0, 10), (0, 10))."""
    lower = [b[0] for b in bounds]
    upper = [b[1] for b in bounds]
    return Window(np.array(lower, float), np.array(upper, float), metric)


def cube(side: float, d: int, origin: float = 0.0, metric: str = "periodic") -> Window:
    """Cubic window [origin, origin + side)^d."""
    lower = np.full(d, origin, float)
    return Window(lower, lower + side, metric)


@dataclass(frozen=True, eq=False)
class PointPattern:
    """A finite set of points inside a window, stored as an (n, d) array."""

    window: Window
    points: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size == 0:
            pts = np.empty((0, self.window.dim))
        if pts.ndim != 2 or pts.shape[1] != self.window.dim:
            raise ValueError("points must form an (n, d) array matching the window")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point coordinates must be finite")
        if pts.shape[0] and not np.all(self.window.contains(pts)):
            raise ValueError("all points must lie inside the window (half-open)")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.window.dim


def distance(a, b, w: Window) -> float:
    """Distance between two points under the window's metric.

    Periodic distance is the minimum over all lattice images of b by the
    window side-length vector.
    """
    a = as_point(a)
    b = as_point(b)
    if a.shape != b.shape or a.shape[0] != w.dim:
        raise ValueError("dimension mismatch")
    delta = np.abs(a - b)
    if w.metric == "periodic":
        delta = np.minimum(delta, w.sides - delta)
    return float(np.sqrt(np.sum(delta * delta)))


def distances_to(point, points: np.ndarray, w: Window) -> np.ndarray:
    """Distances from one point to each row of an (n, d) array."""
    if points.shape[0] == 0:
        return np.empty(0)
    delta = np.abs(points - as_point(point))
    if w.metric == "periodic":
        delta = np.minimum(delta, w.sides - delta)
    return np.sqrt(np.sum(delta * delta, axis=1))


def pairwise_distances(points: np.ndarray, w: Window) -> np.ndarray:
    """Full (n, n) distance matrix under the window's metric."""
    n = points.shape[0]
    if n == 0:
        return np.empty((0, 0))
    delta = np.abs(points[:, None, :] - points[None, :, :])
    if w.metric == "periodic":
        delta = np.minimum(delta, w.sides - delta)
    return np.sqrt(np.sum(delta * delta, axis=2))


def volume(w: Window) -> float:
    """Lebesgue measure of the window (product of side lengths)."""
    return float(np.prod(w.sides))


def unit_ball_volume(d: int) -> float:
    """Volume of the d-dimensional unit ball."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def ball_volume(r: float, d: int) -> float:
    return unit_ball_volume(d) * r**d


def grid_centers(w: Window, n_per_axis: int) -> np.ndarray:
    """Centers of the n_per_axis^d congruent cells tiling w, row-major order.

    Row-major: the last axis varies fastest.
    """
    if n_per_axis < 1:
        raise ValueError("n_per_axis must be >= 1")
    if n_per_axis**w.dim > MAX_GRID_CELLS:
        raise ValueError(f"grid would exceed {MAX_GRID_CELLS} cells")
    step = w.sides / n_per_axis
    axes = [
        w.lower[i] + step[i] * (np.arange(n_per_axis) + 0.5) for i in range(w.dim)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass(frozen=True)
class RandomStream:
    """Deterministic hierarchical random stream.

    Derivation is by (master_seed, path), not sequential splitting, so the
    stream a worker receives never depends on thread scheduling. derive() is
    pure: identical (master_seed, path, i) yields an identical child.
    """

    master_seed: int
    path: tuple = ()

    def __post_init__(self):
        if not (0 <= int(self.master_seed) < 2**64):
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "path", tuple(int(i) for i in self.path))

    def derive(self, i: int) -> "RandomStream":
        return RandomStream(self.master_seed, self.path + (int(i),))

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at this stream's origin."""
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.path)
        return np.random.Generator(np.random.PCG64(seq))


def derive(stream: RandomStream, i: int) -> RandomStream:
    return stream.derive(i)


def sort_points(points: np.ndarray) -> np.ndarray:
    """Lexicographic point order, so sampler output is deterministic."""
    if points.shape[0] <= 1:
        return points
    order = np.lexsort(points.T[::-1])
    return points[order]


def run_indexed(n: int, fn, threads: int = 1) -> list:
    """Evaluate fn(0..n-1), collecting results in index order.

    Work items are pure functions of their index (each derives its own
    stream), so the reduction order is fixed regardless of scheduling and
    results are identical for any thread count.
    """
    if threads <= 1 or n <= 1:
        return [fn(i) for i in range(n)]
    from concurrent.futures import ThreadPoolExecutor

    results = [None] * n
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(fn, i): i for i in range(n)}
        for fut, i in futures.items():
            results[i] = fut.result()
    return results
