"""Random geometric graphs, motif counts, U-statistics, and scaling runs.

The geometric graph here uses the direct convention: points are adjacent
when their distance is at most r.  (The percolation module's Gilbert graph
connects at distance 2r, the grain-overlap convention; rgg(pattern, r)
equals gilbert_graph(pattern, r/2) edge for edge.)

Motif counting enumerates connected induced subgraphs only, growing
subsets from each root vertex so every connected k-subset is visited
exactly once; isomorphism is decided by an exhaustive canonical form,
which is exact and cheap for motifs of at most 5 vertices.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from .core import PointPattern, RandomStream, Window, box, run_indexed
from .percolation import Graph, _edge_index_array
from .procgen import GeneratorSpec, sample

__all__ = [
    "Motif",
    "GraphStats",
    "ScalingRow",
    "MOTIF_NAMES",
    "named_motif",
    "rgg",
    "induced_subgraph_count",
    "u_statistic",
    "u_statistic_pattern",
    "graph_stats",
    "scaling_experiment",
    "scaling_to_csv",
]

MAX_MOTIF_VERTICES = 5
DEFAULT_EXACT_CHROMATIC_LIMIT = 60


@dataclass(frozen=True, eq=False)
class Motif:
    """A small connected graph to count occurrences of."""

    k: int
    adjacency: np.ndarray
    name: str = ""

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=bool)
        object.__setattr__(self, "adjacency", adj)
        if self.k < 2 or self.k > MAX_MOTIF_VERTICES:
            raise ValueError(
                f"motif too large: need 2 <= k <= {MAX_MOTIF_VERTICES}, got {self.k}"
            )
        if adj.shape != (self.k, self.k):
            raise ValueError("adjacency must be k x k")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        if adj.diagonal().any():
            raise ValueError("adjacency must have a zero diagonal")
        if not _is_connected_adjacency(adj):
            raise ValueError("motif must be connected")

    def canonical_form(self) -> int:
        return _canonical_form(self.adjacency)


def _is_connected_adjacency(adj: np.ndarray) -> bool:
    k = adj.shape[0]
    seen = {0}
    frontier = [0]
    while frontier:
        v = frontier.pop()
        for u in np.flatnonzero(adj[v]):
            if u not in seen:
                seen.add(int(u))
                frontier.append(int(u))
    return len(seen) == k


def _canonical_form(adj: np.ndarray) -> int:
    """Smallest upper-triangle bitmask over all vertex relabelings."""
    k = adj.shape[0]
    pair_bits = list(combinations(range(k), 2))
    best = None
    for perm in permutations(range(k)):
        mask = 0
        for bit, (i, j) in enumerate(pair_bits):
            if adj[perm[i], perm[j]]:
                mask |= 1 << bit
        if best is None or mask < best:
            best = mask
    return best


_MOTIF_TABLE = {
    "edge": [(0, 1)],
    "path3": [(0, 1), (1, 2)],
    "triangle": [(0, 1), (1, 2), (0, 2)],
    "star3": [(0, 1), (0, 2), (0, 3)],
    "path4": [(0, 1), (1, 2), (2, 3)],
    "cycle4": [(0, 1), (1, 2), (2, 3), (0, 3)],
    "clique4": [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
}

MOTIF_NAMES = tuple(sorted(_MOTIF_TABLE))


def named_motif(name: str) -> Motif:
    """One of the built-in motifs: edge, path3, triangle, star3, path4,
    cycle4, clique4."""
    if name not in _MOTIF_TABLE:
        raise ValueError(f"unknown motif {name!r}; choose from {MOTIF_NAMES}")
    edges = _MOTIF_TABLE[name]
    k = max(max(e) for e in edges) + 1
    adj = np.zeros((k, k), dtype=bool)
    for i, j in edges:
        adj[i, j] = adj[j, i] = True
    return Motif(k, adj, name)


def rgg(pattern: PointPattern, r: float) -> Graph:
    """Geometric graph joining points at distance <= r."""
    keep = _edge_index_array(pattern, r / 2.0)
    return Graph(
        pattern.points.shape[0],
        tuple((int(i), int(j)) for i, j in keep),
        pattern,
    )


def _neighbor_sets(g: Graph) -> list:
    neighbors = [set() for _ in range(g.n_vertices)]
    for i, j in g.edges:
        neighbors[i].add(j)
        neighbors[j].add(i)
    return neighbors


def _connected_subsets_from_root(neighbors: list, root: int, k: int) -> list:
    """All connected k-subsets whose minimum vertex is the root.

    Subsets grow by attaching exclusive neighbors of the newest vertex, so
    each subset appears exactly once across all roots.
    """
    results = []

    def extend(sub: tuple, extension: set, banned: set):
        if len(sub) == k:
            results.append(sub)
            return
        ext = set(extension)
        while ext:
            w = ext.pop()
            fresh = {
                u
                for u in neighbors[w]
                if u > root and u not in banned and u not in ext and u not in sub
            }
            extend(sub + (w,), ext | fresh, banned | fresh | {w})

    initial = {u for u in neighbors[root] if u > root}
    extend((root,), initial, initial | {root})
    return results


def induced_subgraph_count(g: Graph, motif: Motif, threads: int = 1) -> int:
    """Number of vertex subsets whose induced subgraph matches the motif.

    This is the unordered count; multiply by k! for the sum over ordered
    k-tuples (as u_statistic does).
    """
    if motif.k > MAX_MOTIF_VERTICES:
        raise ValueError("motif too large")
    neighbors = _neighbor_sets(g)
    target = motif.canonical_form()
    k = motif.k

    def count_from_root(root: int) -> int:
        total = 0
        for sub in _connected_subsets_from_root(neighbors, root, k):
            adj = np.zeros((k, k), dtype=bool)
            for a, b in combinations(range(k), 2):
                if sub[b] in neighbors[sub[a]]:
                    adj[a, b] = adj[b, a] = True
            if _canonical_form(adj) == target:
                total += 1
        return total

    return sum(run_indexed(g.n_vertices, count_from_root, threads))


def _subset_values(pattern: PointPattern, k: int, f) -> list:
    points = pattern.points
    n = points.shape[0]
    values = []
    for subset in combinations(range(n), k):
        value = float(f(points[list(subset)]))
        if not math.isfinite(value) or value < 0:
            raise ValueError("f must be finite and non-negative on every subset")
        values.append(value)
    return values


def u_statistic(pattern: PointPattern, k: int, f) -> float:
    """Sum of a symmetric non-negative function over ordered k-tuples of
    distinct points: k! times the sum over unordered subsets."""
    if not 1 <= k <= 4:
        raise ValueError("k must be between 1 and 4")
    return math.factorial(k) * sum(_subset_values(pattern, k, f))


def u_statistic_pattern(pattern: PointPattern, k: int, f) -> PointPattern:
    """The multiset of f-values over unordered k-subsets, as a pattern on
    the half-line (a 1-d window just wide enough to hold the maximum)."""
    if not 1 <= k <= 4:
        raise ValueError("k must be between 1 and 4")
    values = sorted(_subset_values(pattern, k, f))
    top = values[-1] if values else 0.0
    upper = top * (1.0 + 1e-9) + 1e-12 if top > 0 else 1.0
    w = box((0.0, upper), metric="euclidean")
    return PointPattern(w, np.array(values).reshape(-1, 1))


@dataclass(frozen=True)
class GraphStats:
    """Clique number, max degree, and (possibly bounded) chromatic number."""

    clique_number: int
    max_degree: int
    chromatic_number: int
    chromatic_exact: bool

    def __post_init__(self):
        if not (
            self.clique_number <= self.chromatic_number <= self.max_degree + 1
        ):
            raise ValueError(
                "statistics violate clique <= chromatic <= max degree + 1"
            )


def _max_clique(neighbors: list, n: int) -> int:
    """Branch and bound, pruning with a greedy coloring of the candidates."""
    if n == 0:
        return 0
    order = sorted(range(n), key=lambda v: len(neighbors[v]))
    best = 1

    def color_bound(cands: list) -> int:
        classes = []
        for v in cands:
            for cls in classes:
                if all(u not in neighbors[v] for u in cls):
                    cls.append(v)
                    break
            else:
                classes.append([v])
        return len(classes)

    def expand(size: int, cands: list):
        nonlocal best
        if not cands:
            best = max(best, size)
            return
        if size + color_bound(cands) <= best:
            return
        for idx in range(len(cands) - 1, -1, -1):
            if size + idx + 1 <= best:
                return
            v = cands[idx]
            nxt = [u for u in cands[:idx] if u in neighbors[v]]
            if size + 1 > best and not nxt:
                best = size + 1
            else:
                expand(size + 1, nxt)

    expand(0, order)
    return best


def _dsatur_greedy(neighbors: list, n: int) -> int:
    """Number of colors used by the saturation-order greedy coloring."""
    if n == 0:
        return 0
    colors = [-1] * n
    neighbor_colors = [set() for _ in range(n)]
    for _ in range(n):
        v = max(
            (u for u in range(n) if colors[u] == -1),
            key=lambda u: (len(neighbor_colors[u]), len(neighbors[u])),
        )
        c = 0
        while c in neighbor_colors[v]:
            c += 1
        colors[v] = c
        for u in neighbors[v]:
            neighbor_colors[u].add(c)
    return max(colors) + 1


def _colorable(neighbors: list, n: int, k: int) -> bool:
    """Proper k-colorability by saturation-guided backtracking."""
    colors = [-1] * n
    neighbor_colors = [set() for _ in range(n)]

    def backtrack(done: int, used: int) -> bool:
        if done == n:
            return True
        v = max(
            (u for u in range(n) if colors[u] == -1),
            key=lambda u: (len(neighbor_colors[u]), len(neighbors[u])),
        )
        # Trying one brand-new color is enough; higher fresh colors are
        # symmetric to it.
        for c in range(min(k, used + 1)):
            if c in neighbor_colors[v]:
                continue
            colors[v] = c
            added = [u for u in neighbors[v] if c not in neighbor_colors[u]]
            for u in added:
                neighbor_colors[u].add(c)
            if backtrack(done + 1, max(used, c + 1)):
                return True
            colors[v] = -1
            for u in added:
                neighbor_colors[u].discard(c)
        return False

    return backtrack(0, 0)


def graph_stats(
    g: Graph, exact_chromatic_limit: int = DEFAULT_EXACT_CHROMATIC_LIMIT
) -> GraphStats:
    """Clique number (exact), max degree (exact), and chromatic number
    (exact up to the size limit, else a flagged greedy upper bound)."""
    n = g.n_vertices
    neighbors = _neighbor_sets(g)
    max_degree = max((len(s) for s in neighbors), default=0)
    clique = _max_clique(neighbors, n)
    greedy = _dsatur_greedy(neighbors, n)
    if n <= exact_chromatic_limit:
        chromatic = clique
        while chromatic < greedy and not _colorable(neighbors, n, chromatic):
            chromatic += 1
        exact = True
    else:
        chromatic, exact = greedy, False
    return GraphStats(clique, max_degree, chromatic, exact)


@dataclass(frozen=True)
class ScalingRow:
    """Graph statistics averaged over replications at one window scale."""

    n: int
    r: float
    mean_clique: float
    mean_max_degree: float
    mean_chromatic: float
    mean_edges: float
    prob_clique_below: float
    clique_threshold: int
    replications: int
    chromatic_all_exact: bool


def scaling_experiment(
    spec: GeneratorSpec,
    r_rule,
    n_list,
    reps: int = 20,
    stream: RandomStream = None,
    d: int = 2,
    clique_threshold: int = 2,
    exact_chromatic_limit: int = DEFAULT_EXACT_CHROMATIC_LIMIT,
    threads: int = 1,
) -> list:
    """Sample patterns on growing centered windows of volume n, build the
    geometric graph at radius r_rule(n), and average its statistics."""
    if stream is None:
        raise ValueError("an explicit RandomStream is required")
    rows = []
    for idx, n in enumerate(n_list):
        r = float(r_rule(n))
        if not r > 0:
            raise ValueError("r_rule must return positive radii")
        half = 0.5 * float(n) ** (1.0 / d)
        w = box(*(((-half, half),) * d), metric="euclidean")
        level = stream.derive(idx)

        def one(j: int):
            pattern = sample(spec, w, level.derive(j))
            graph = rgg(pattern, r)
            stats = graph_stats(graph, exact_chromatic_limit)
            return (
                stats.clique_number,
                stats.max_degree,
                stats.chromatic_number,
                len(graph.edges),
                stats.chromatic_exact,
            )

        data = run_indexed(reps, one, threads)
        cliques = np.array([row[0] for row in data], dtype=float)
        rows.append(
            ScalingRow(
                n=int(n),
                r=r,
                mean_clique=float(np.mean(cliques)),
                mean_max_degree=float(np.mean([row[1] for row in data])),
                mean_chromatic=float(np.mean([row[2] for row in data])),
                mean_edges=float(np.mean([row[3] for row in data])),
                prob_clique_below=float(np.mean(cliques < clique_threshold)),
                clique_threshold=clique_threshold,
                replications=reps,
                chromatic_all_exact=all(row[4] for row in data),
            )
        )
    return rows


def scaling_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(
        "n,r,mean_clique,mean_max_degree,mean_chromatic,mean_edges,"
        "prob_clique_below\n"
    )
    for row in rows:
        buf.write(
            f"{row.n},{format(row.r, '.17g')},{format(row.mean_clique, '.17g')},"
            f"{format(row.mean_max_degree, '.17g')},"
            f"{format(row.mean_chromatic, '.17g')},"
            f"{format(row.mean_edges, '.17g')},"
            f"{format(row.prob_clique_below, '.17g')}\n"
        )
    return buf.getvalue()
