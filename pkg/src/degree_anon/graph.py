"""Simple undirected graphs, edge-list I/O, degree sequences and edge edits."""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import (
    DuplicateEdgeWarning,
    GraphValidationError,
    InvalidPlanError,
    ParseError,
    SelfLoopWarning,
)

Pair = tuple[int, int]

_HEADER_RE = re.compile(r"^#\s*n\s*=\s*(\d+)\s*$")
_ISOLATED_RE = re.compile(r"^#\s*isolated\s*:(.*)$")


def canonical(u: int, v: int) -> Pair:
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable simple undirected graph on dense vertex ids ``0..n-1``.

    ``labels[i]`` is the original integer label of vertex ``i``; it only
    matters for file output.
    """

    __slots__ = ("_n", "_edges", "_adj", "_labels", "_degrees")

    def __init__(self, n: int, edges: Iterable[Pair] = (), labels: Sequence[int] | None = None) -> None:
        if n < 0:
            raise GraphValidationError("vertex count must be non-negative")
        adj: list[set[int]] = [set() for _ in range(n)]
        canon: set[Pair] = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphValidationError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphValidationError(f"edge ({u}, {v}) out of range for n={n}")
            canon.add(canonical(u, v))
            adj[u].add(v)
            adj[v].add(u)
        if labels is None:
            labels = range(n)
        labels = tuple(int(x) for x in labels)
        if len(labels) != n:
            raise GraphValidationError("label count does not match vertex count")
        if len(set(labels)) != n:
            raise GraphValidationError("vertex labels must be distinct")
        self._n = n
        self._edges = frozenset(canon)
        self._adj = tuple(frozenset(a) for a in adj)
        self._labels = labels
        degrees = np.fromiter((len(a) for a in adj), dtype=np.int64, count=n)
        degrees.setflags(write=False)
        self._degrees = degrees

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> frozenset[Pair]:
        return self._edges

    @property
    def labels(self) -> tuple[int, ...]:
        return self._labels

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    def degree(self, v: int) -> int:
        return int(self._degrees[v])

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def sorted_edges(self) -> list[Pair]:
        return sorted(self._edges)

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self._n, self._n), dtype=float)
        if self._edges:
            e = np.array(self.sorted_edges())
            a[e[:, 0], e[:, 1]] = 1.0
            a[e[:, 1], e[:, 0]] = 1.0
        return a

    def sparse_adjacency(self) -> sp.csr_matrix:
        if not self._edges:
            return sp.csr_matrix((self._n, self._n))
        e = np.array(self.sorted_edges())
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        data = np.ones(len(rows))
        return sp.csr_matrix((data, (rows, cols)), shape=(self._n, self._n))

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Graph with vertex ``v`` renamed ``perm[v]``."""
        return Graph(self._n, ((perm[u], perm[v]) for u, v in self._edges))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._n, self._edges))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.m})"


@dataclass(frozen=True)
class DegreeSequence:
    """Degrees sorted descending; ``order[i]`` is the vertex at position ``i``."""

    values: tuple[int, ...]
    order: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.order):
            raise ValueError("values and order must have the same length")
        if any(self.values[i] < self.values[i + 1] for i in range(len(self.values) - 1)):
            raise ValueError("degree sequence must be sorted descending")
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError("order must be a permutation of 0..n-1")

    def __len__(self) -> int:
        return len(self.values)

    def by_vertex(self) -> np.ndarray:
        out = np.empty(len(self.values), dtype=np.int64)
        out[list(self.order)] = self.values
        return out

    @classmethod
    def from_vertex_values(cls, values: Sequence[int], tiebreak: Sequence[int] | None = None) -> DegreeSequence:
        """Sort per-vertex values descending.

        Ties go by ``tiebreak`` rank (ascending), defaulting to vertex id.
        """
        vals = np.asarray(values, dtype=np.int64)
        rank = np.arange(len(vals)) if tiebreak is None else np.asarray(tiebreak)
        order = np.lexsort((rank, -vals))
        return cls(tuple(int(x) for x in vals[order]), tuple(int(x) for x in order))


@dataclass(frozen=True)
class EditPlan:
    """Edge additions and deletions, plus the net slack per vertex.

    ``slack_used[v]`` is the signed amount by which the realized degree
    change of ``v`` departs from the requested one (zero in strict mode).
    """

    additions: frozenset[Pair] = frozenset()
    deletions: frozenset[Pair] = frozenset()
    slack_used: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "additions", frozenset(canonical(u, v) for u, v in self.additions))
        object.__setattr__(self, "deletions", frozenset(canonical(u, v) for u, v in self.deletions))
        object.__setattr__(self, "slack_used", tuple(int(s) for s in self.slack_used))

    @property
    def size(self) -> int:
        return len(self.additions) + len(self.deletions)

    @property
    def total_slack(self) -> int:
        return sum(abs(s) for s in self.slack_used)

    def per_vertex_counts(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Per-vertex numbers of incident additions and deletions."""
        adds = np.zeros(n, dtype=np.int64)
        dels = np.zeros(n, dtype=np.int64)
        for u, v in self.additions:
            adds[u] += 1
            adds[v] += 1
        for u, v in self.deletions:
            dels[u] += 1
            dels[v] += 1
        return adds, dels


def degree_sequence(g: Graph) -> DegreeSequence:
    """Descending degree sequence, ties broken by ascending vertex id."""
    return DegreeSequence.from_vertex_values(g.degrees)


def apply_edits(g: Graph, plan: EditPlan) -> Graph:
    """Return ``(V, (E - deletions) | additions)``; ``g`` is left untouched."""
    for u, v in plan.additions:
        if u == v or not (0 <= u < g.n and 0 <= v < g.n):
            raise InvalidPlanError(f"addition ({u}, {v}) is not a vertex pair of the graph")
        if g.has_edge(u, v):
            raise InvalidPlanError(f"addition ({u}, {v}) is already an edge")
    for u, v in plan.deletions:
        if not (0 <= u < g.n and 0 <= v < g.n) or not g.has_edge(u, v):
            raise InvalidPlanError(f"deletion ({u}, {v}) is not an edge")
    return Graph(g.n, (g.edges - plan.deletions) | plan.additions, labels=g.labels)


# --------------------------------------------------------------------------
# edge-list I/O

@dataclass
class ParsedEdgeList:
    graph: Graph
    duplicates: int = 0
    self_loops: int = 0


def _iter_lines(text: str) -> Iterator[tuple[int, str]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        yield number, raw.strip()


def parse_edge_list(text: str, *, strict: bool = True) -> ParsedEdgeList:
    """Parse edge-list text into a graph with dense ids.

    Lines starting with ``%`` or ``#`` are comments, except the headers
    ``# n=<count>`` (declares vertices ``0..count-1``) and
    ``# isolated: <label> ...`` (declares degree-0 vertices by label).
    Extra columns after the first two (weights, timestamps) are ignored.
    Labels are mapped to dense ids in ascending label order.
    """
    declared_n: int | None = None
    isolated: list[int] = []
    raw_edges: list[tuple[int, int]] = []
    loop_vertices: set[int] = set()
    loops = 0
    for number, line in _iter_lines(text):
        if not line:
            continue
        if line[0] in "#%":
            if line[0] == "#":
                if (match := _HEADER_RE.match(line)) is not None:
                    declared_n = int(match.group(1))
                elif (match := _ISOLATED_RE.match(line)) is not None:
                    try:
                        isolated.extend(int(tok) for tok in match.group(1).split())
                    except ValueError:
                        raise ParseError("non-integer label in isolated list", number) from None
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise ParseError(f"expected two vertex labels, got {line!r}", number)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ParseError(f"non-integer vertex label in {line!r}", number) from None
        if u == v:
            if strict:
                raise GraphValidationError(f"line {number}: self-loop at vertex {u}")
            loops += 1
            # the vertex still exists even though its loop is dropped
            loop_vertices.add(u)
            continue
        raw_edges.append((u, v))

    label_set = {x for e in raw_edges for x in e} | set(isolated) | loop_vertices
    if declared_n is not None:
        if label_set and (min(label_set) < 0 or max(label_set) >= declared_n) and not isolated:
            raise GraphValidationError(
                f"header declares n={declared_n} but labels fall outside 0..{declared_n - 1}"
            )
        if not isolated:
            label_set |= set(range(declared_n))
        if len(label_set) != declared_n:
            raise GraphValidationError(
                f"header declares n={declared_n} but {len(label_set)} vertices were found"
            )
    labels = sorted(label_set)
    index = {label: i for i, label in enumerate(labels)}
    seen: set[Pair] = set()
    duplicates = 0
    for u, v in raw_edges:
        pair = canonical(index[u], index[v])
        if pair in seen:
            duplicates += 1
        else:
            seen.add(pair)
    graph = Graph(len(labels), seen, labels=labels)
    return ParsedEdgeList(graph, duplicates=duplicates, self_loops=loops)


def load_graph(path: str | Path, *, strict: bool = True) -> Graph:
    """Read an edge-list file.

    Duplicate edges are dropped with a :class:`DuplicateEdgeWarning`. A
    self-loop raises :class:`GraphValidationError` when ``strict`` is set
    and is otherwise dropped with a :class:`SelfLoopWarning`.
    """
    text = Path(path).read_text(encoding="utf-8")
    parsed = parse_edge_list(text, strict=strict)
    if parsed.duplicates:
        warnings.warn(DuplicateEdgeWarning(parsed.duplicates), stacklevel=2)
    if parsed.self_loops:
        warnings.warn(SelfLoopWarning(parsed.self_loops), stacklevel=2)
    return parsed.graph


def format_edge_list(g: Graph) -> str:
    labels = g.labels
    if labels == tuple(range(g.n)):
        lines = [f"# n={g.n}"]
    else:
        # a count header would contradict labels outside 0..n-1
        lonely = [labels[v] for v in range(g.n) if g.degrees[v] == 0]
        lines = ["# isolated: " + " ".join(str(x) for x in lonely)] if lonely else []
    # labels are increasing in the dense id, so id order is label order
    lines.extend(f"{labels[u]} {labels[v]}" for u, v in g.sorted_edges())
    return "\n".join(lines) + "\n"


def write_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g), encoding="utf-8")
