"""Deterministic community detection and pair-agreement comparison."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import GraphValidationError, ParseError
from .graph import Graph


@dataclass(frozen=True)
class Clustering:
    """Cluster id per vertex; ids run contiguously from 0."""

    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        ids = set(self.assignment)
        if ids != set(range(len(ids))):
            raise ValueError("cluster ids must be contiguous from 0")

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> Clustering:
        """Relabel arbitrary ids in order of each cluster's smallest member."""
        mapping: dict[int, int] = {}
        out = []
        for label in labels:
            if label not in mapping:
                mapping[label] = len(mapping)
            out.append(mapping[label])
        return cls(tuple(out))

    @classmethod
    def singletons(cls, n: int) -> Clustering:
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def count(self) -> int:
        return len(set(self.assignment))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.assignment, dtype=np.int64)

    def clusters(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.count)]
        for v, c in enumerate(self.assignment):
            groups[c].append(v)
        return groups


def detect_communities(g: Graph) -> Clustering:
    """Greedy modularity agglomeration (Clauset-Newman-Moore style).

    Merging clusters ``i`` and ``j`` changes modularity by
    ``(2m * e_ij - D_i * D_j) / (2 m^2)``, where ``e_ij`` counts edges
    between them and ``D`` is total degree. The numerator is an integer, so
    gains are compared exactly. Each step merges the pair with the largest
    positive gain, ties going to the smallest ``(i, j)``; the merged cluster
    keeps the smaller id. Only adjacent clusters can have a positive gain.
    """
    n, m = g.n, g.m
    if m == 0:
        return Clustering.singletons(n)
    two_m = 2 * m
    total = [int(x) for x in g.degrees]
    links: list[dict[int, int]] = [dict() for _ in range(n)]
    for u, v in g.edges:
        links[u][v] = 1
        links[v][u] = 1
    parent = list(range(n))
    alive = set(range(n))
    while True:
        best_gain, best_pair = 0, None
        for i in sorted(alive):
            for j, e in links[i].items():
                if j <= i:
                    continue
                gain = two_m * e - total[i] * total[j]
                if gain > best_gain or (gain == best_gain and best_pair is not None and (i, j) < best_pair):
                    best_gain, best_pair = gain, (i, j)
        if best_pair is None:
            break
        i, j = best_pair
        # fold j into i
        for x, e in links[j].items():
            if x == i:
                continue
            links[i][x] = links[i].get(x, 0) + e
            links[x][i] = links[x].get(i, 0) + e
            del links[x][j]
        del links[i][j]
        links[j] = {}
        total[i] += total[j]
        parent[j] = i
        alive.discard(j)

    def root(v: int) -> int:
        while parent[v] != v:
            v = parent[v]
        return v

    return Clustering.from_labels([root(v) for v in range(n)])


def precision_index(c1: Clustering, c2: Clustering) -> float:
    """Fraction of vertex pairs on which the two clusterings agree.

    A pair agrees when both clusterings put it in one cluster or both
    separate it. Counted from the contingency table, so the cost is linear
    in ``n`` plus the table size. Defined as 1 for fewer than two vertices.
    """
    if c1.n != c2.n:
        raise GraphValidationError(f"clusterings cover {c1.n} and {c2.n} vertices")
    n = c1.n
    if n < 2:
        return 1.0
    a, b = c1.as_array(), c2.as_array()
    table = np.zeros((c1.count, c2.count), dtype=np.int64)
    np.add.at(table, (a, b), 1)

    def pairs(x: np.ndarray) -> int:
        return int((x * (x - 1) // 2).sum())

    both = pairs(table)
    same1 = pairs(table.sum(axis=1))
    same2 = pairs(table.sum(axis=0))
    total = n * (n - 1) // 2
    disagree = same1 + same2 - 2 * both
    return (total - disagree) / total


def precision_error(c1: Clustering, c2: Clustering) -> float:
    return 1.0 - precision_index(c1, c2)


def format_clustering(c: Clustering) -> str:
    return "".join(f"{v} {cid}\n" for v, cid in enumerate(c.assignment))


def parse_clustering(text: str) -> Clustering:
    """Read ``vertex cluster_id`` lines; vertices must be exactly ``0..n-1``."""
    entries: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'vertex cluster_id', got {line!r}", lineno)
        try:
            v, c = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer entry in {line!r}", lineno) from None
        if v in entries:
            raise ParseError(f"vertex {v} listed twice", lineno)
        entries[v] = c
    if set(entries) != set(range(len(entries))):
        raise GraphValidationError("clustering must list every vertex 0..n-1 exactly once")
    return Clustering(tuple(entries[v] for v in range(len(entries))))


def write_clustering(c: Clustering, path: str | Path) -> None:
    Path(path).write_text(format_clustering(c))
