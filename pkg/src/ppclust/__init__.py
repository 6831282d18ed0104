"""Point-process simulation and clustering-comparison workbench.

The package is organised as a stack of small modules:

- ``core``: windows, point patterns, metrics, seeded random streams.
- ``dists``: integer count distributions and exact convex-order checks.
- ``procgen``: point-process generators (lattices, cluster and Cox
  processes, Ginibre) behind a uniform :class:`~ppclust.procgen.GeneratorSpec`.
- ``summaries``: Monte Carlo estimators of K-functions, void
  probabilities, moment measures and Laplace functionals.
- ``compare``: directional clustering comparisons and concentration
  checks against Poisson references.
- ``shotnoise``: additive/extremal shot-noise fields and coverage volumes.
- ``percolation``: geometric graphs, component sweeps, critical-radius
  estimation, SINR connectivity.
- ``graphs``: subgraph/motif counts, U-statistics, clique and chromatic
  scaling experiments.
- ``complexes``: Cech/Vietoris-Rips complexes and Betti numbers.
- ``cli``: the ``ppclust`` configuration-driven experiment runner.
"""

from . import (
    compare,
    complexes,
    core,
    dists,
    graphs,
    percolation,
    procgen,
    shotnoise,
    summaries,
)
from .core import PointPattern, RandomStream, Window, box, cube
from .procgen import GeneratorSpec

__version__ = "0.1.0"

__all__ = [
    "GeneratorSpec",
    "PointPattern",
    "RandomStream",
    "Window",
    "__version__",
    "box",
    "compare",
    "complexes",
    "core",
    "cube",
    "dists",
    "graphs",
    "percolation",
    "procgen",
    "shotnoise",
    "summaries",
]
