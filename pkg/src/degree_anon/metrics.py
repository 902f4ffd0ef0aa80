"""Utility measures of a graph and the relative-error report between two graphs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.sparse.csgraph import connected_components, shortest_path

from .clustering import Clustering
from .errors import GraphValidationError
from .graph import Graph

DENSE_MAX_N = 2000
REL_EPS = 1e-12
POWER_TOL = 1e-13
POWER_MAX_ITER = 200_000

METRIC_NAMES = (
    "lambda_max_adj",
    "lambda2_lap",
    "avg_path",
    "harmonic_mean_dist",
    "modularity",
    "transitivity",
    "subgraph_centrality_mean",
)


class EigenMetrics(NamedTuple):
    lambda_max_adj: float
    lambda2_lap: float


class DistanceMetrics(NamedTuple):
    avg_path: float
    harmonic_mean_dist: float


class StructureMetrics(NamedTuple):
    modularity: float
    transitivity: float
    subgraph_centrality: np.ndarray

    @property
    def subgraph_centrality_mean(self) -> float:
        sc = self.subgraph_centrality
        return float(sc.mean()) if len(sc) else float("nan")


# --------------------------------------------------------------------------
# spectra

def _power_top(matvec, x0: np.ndarray, deflate: np.ndarray | None = None) -> tuple[float, np.ndarray]:
    """Largest eigenpair of a positive semidefinite operator by power iteration.

    ``deflate`` holds orthonormal columns projected out at every step.
    Stops once the Rayleigh quotient settles.
    """
    x = x0.astype(float)

    def project(v: np.ndarray) -> np.ndarray:
        if deflate is not None:
            v = v - deflate @ (deflate.T @ v)
        return v

    x = project(x)
    norm = np.linalg.norm(x)
    if norm == 0:
        return 0.0, x
    x /= norm
    mu = float(x @ matvec(x))
    for _ in range(POWER_MAX_ITER):
        y = project(matvec(x))
        norm = np.linalg.norm(y)
        if norm == 0:
            return 0.0, x
        x = y / norm
        new_mu = float(x @ matvec(x))
        if abs(new_mu - mu) <= POWER_TOL * max(1.0, abs(new_mu)):
            return new_mu, x
        mu = new_mu
    return mu, x


def _start_vector(n: int) -> np.ndarray:
    # fixed, non-symmetric start so results are reproducible and unlikely
    # to be orthogonal to the target eigenvector
    return 1.0 + np.arange(n, dtype=float) / max(n, 1) + np.sin(np.arange(n, dtype=float))


def leading_eigenpair(g: Graph, method: str = "auto") -> tuple[float, np.ndarray]:
    """Largest adjacency eigenvalue and a unit eigenvector."""
    n = g.n
    if n == 0:
        return float("nan"), np.zeros(0)
    if method == "auto":
        method = "dense" if n <= DENSE_MAX_N else "power"
    if method == "dense":
        vals, vecs = np.linalg.eigh(g.adjacency_matrix().astype(float))
        return float(vals[-1]), vecs[:, -1]
    if method != "power":
        raise ValueError(f"unknown eigen method {method!r}")
    A = g.sparse_adjacency().astype(float)
    # A + shift*I is positive semidefinite since |lambda| <= max degree
    shift = float(g.degrees.max()) if n else 0.0
    mu, x = _power_top(lambda v: A @ v + shift * v, _start_vector(n))
    return mu - shift, x


def algebraic_connectivity(g: Graph, method: str = "auto") -> float:
    """Second-smallest Laplacian eigenvalue; exactly 0 when ``g`` is disconnected."""
    n = g.n
    if n < 2:
        return 0.0
    components, _ = connected_components(g.sparse_adjacency(), directed=False)
    if components > 1:
        return 0.0
    if method == "auto":
        method = "dense" if n <= DENSE_MAX_N else "power"
    if method == "dense":
        L = np.diag(g.degrees.astype(float)) - g.adjacency_matrix()
        vals = np.linalg.eigvalsh(L)
        return max(float(vals[1]), 0.0)
    if method != "power":
        raise ValueError(f"unknown eigen method {method!r}")
    A = g.sparse_adjacency().astype(float)
    deg = g.degrees.astype(float)
    # Gershgorin: the Laplacian spectrum lies in [0, 2 * max degree]
    c = 2.0 * float(deg.max())
    ones = np.full((n, 1), 1.0 / math.sqrt(n))
    mu, _ = _power_top(lambda v: c * v - (deg * v - A @ v), _start_vector(n), deflate=ones)
    return max(c - mu, 0.0)


def eigen_metrics(g: Graph, method: str = "auto") -> EigenMetrics:
    """``(lambda_max(A), lambda_2(L))``; dense up to 2000 vertices, power iteration beyond."""
    return EigenMetrics(leading_eigenpair(g, method)[0], algebraic_connectivity(g, method))


# --------------------------------------------------------------------------
# distances

def distance_metrics(g: Graph) -> DistanceMetrics:
    """Average shortest path over connected pairs and harmonic mean distance.

    The harmonic mean divides the number of all unordered pairs by the sum
    of reciprocal distances, so disconnected pairs count as infinitely far.
    Without any connected pair the average is NaN and the harmonic mean is
    infinite (NaN when there are no pairs at all).
    """
    n = g.n
    if n < 2:
        return DistanceMetrics(float("nan"), float("nan"))
    dist = shortest_path(g.sparse_adjacency(), method="D", directed=False, unweighted=True)
    iu = np.triu_indices(n, 1)
    d = dist[iu]
    finite = d[np.isfinite(d)]
    pairs = n * (n - 1) // 2
    if len(finite) == 0:
        return DistanceMetrics(float("nan"), float("inf"))
    return DistanceMetrics(float(finite.mean()), float(pairs / np.sum(1.0 / finite)))


# --------------------------------------------------------------------------
# structure

def modularity(g: Graph, partition: Clustering) -> float:
    """Newman modularity of ``partition``; 0 for a graph without edges."""
    if partition.n != g.n:
        raise GraphValidationError(f"partition covers {partition.n} vertices, graph has {g.n}")
    m = g.m
    if m == 0:
        return 0.0
    labels = partition.as_array()
    inside = np.zeros(partition.count, dtype=np.int64)
    for u, v in g.edges:
        if labels[u] == labels[v]:
            inside[labels[u]] += 1
    deg = np.bincount(labels, weights=g.degrees, minlength=partition.count)
    return float(np.sum(inside / m - (deg / (2 * m)) ** 2))


def transitivity(g: Graph) -> float:
    """``3 * triangles / connected triples``; 0 when there are no triples."""
    A = g.sparse_adjacency().astype(np.int64)
    closed = int((A @ A).multiply(A).sum())  # 6 * triangles
    deg = g.degrees.astype(np.int64)
    triples = int((deg * (deg - 1) // 2).sum())
    if triples == 0:
        return 0.0
    return (closed // 2) / triples


def subgraph_centrality(g: Graph) -> np.ndarray:
    """``SC(v) = sum_j u_j(v)^2 exp(lambda_j)`` from the adjacency spectrum."""
    if g.n == 0:
        return np.zeros(0)
    vals, vecs = np.linalg.eigh(g.adjacency_matrix().astype(float))
    with np.errstate(over="ignore"):
        return (vecs ** 2) @ np.exp(vals)


def structure_metrics(g: Graph, partition: Clustering) -> StructureMetrics:
    return StructureMetrics(modularity(g, partition), transitivity(g), subgraph_centrality(g))


# --------------------------------------------------------------------------
# report

@dataclass
class MetricValues:
    lambda_max_adj: float
    lambda2_lap: float
    avg_path: float
    harmonic_mean_dist: float
    modularity: float
    transitivity: float
    subgraph_centrality_mean: float
    subgraph_centrality: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def measure(g: Graph, partition: Clustering, method: str = "auto") -> MetricValues:
    eig = eigen_metrics(g, method)
    dist = distance_metrics(g)
    st = structure_metrics(g, partition)
    return MetricValues(
        eig.lambda_max_adj,
        eig.lambda2_lap,
        dist.avg_path,
        dist.harmonic_mean_dist,
        st.modularity,
        st.transitivity,
        st.subgraph_centrality_mean,
        st.subgraph_centrality,
    )


def relative_error(before: float, after: float, eps: float = REL_EPS) -> float:
    """``|after - before| / max(|before|, eps)``.

    Two equal non-finite values (both NaN, or the same infinity) count as no
    change; any other comparison involving a non-finite value is NaN.
    """
    if not (math.isfinite(before) and math.isfinite(after)):
        same = (math.isnan(before) and math.isnan(after)) or before == after
        return 0.0 if same else float("nan")
    return abs(after - before) / max(abs(before), eps)


@dataclass
class UtilityReport:
    original: MetricValues
    anonymized: MetricValues
    errors: dict[str, float]
    flags: list[str]

    def to_dict(self) -> dict:
        """JSON-ready form; non-finite numbers become ``null``."""
        return {
            "original": {k: _json_number(v) for k, v in self.original.as_dict().items()},
            "anonymized": {k: _json_number(v) for k, v in self.anonymized.as_dict().items()},
            "errors": {k: _json_number(v) for k, v in self.errors.items()},
            "flags": list(self.flags),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)


def _json_number(x: float) -> float | None:
    x = float(x)
    return x if math.isfinite(x) else None


def _flags(label: str, g: Graph, values: MetricValues) -> list[str]:
    out = []
    if g.m == 0:
        out.append(f"{label}.modularity: graph has no edges, reported as 0")
    for name, value in values.as_dict().items():
        if math.isnan(value):
            out.append(f"{label}.{name}: undefined")
        elif math.isinf(value):
            out.append(f"{label}.{name}: infinite")
    return out


def utility_error_report(
    g: Graph,
    g2: Graph,
    p1: Clustering,
    p2: Clustering,
    method: str = "auto",
) -> UtilityReport:
    """All seven measures for both graphs and their relative errors."""
    if g.n != g2.n:
        raise GraphValidationError(f"graphs have {g.n} and {g2.n} vertices")
    before = measure(g, p1, method)
    after = measure(g2, p2, method)
    errors = {
        name: relative_error(getattr(before, name), getattr(after, name))
        for name in METRIC_NAMES
    }
    flags = _flags("original", g, before) + _flags("anonymized", g2, after)
    flags += [f"errors.{name}: not comparable" for name, e in errors.items() if math.isnan(e)]
    return UtilityReport(before, after, errors, flags)
