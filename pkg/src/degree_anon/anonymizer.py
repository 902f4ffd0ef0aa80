"""Chunked k-degree anonymization of a degree sequence.

The sorted sequence is cut into runs of at least ``k`` positions. Each run
gets an anchor degree (the member value nearest the run mean) and every
member is clamped into a window of width ``t`` that contains the anchor, so
all members of a run end up within ``t`` of each other. The per-run edit
budgets ``a`` (additions) and ``d`` (deletions) are the largest change the
clamp needs, unless the caller overrides them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .graph import DegreeSequence


@dataclass(frozen=True)
class AnonymizationParams:
    """Anonymity level ``k``, tolerance ``t`` and optional budget overrides.

    ``min_budget`` is a floor on the computed per-vertex budgets. A floor of
    1 lets the realizer route an edit pair through a vertex whose degree
    does not change (add ``u-x``, delete ``x-w``).
    """

    k: int
    t: int = 0
    a: int | None = None
    d: int | None = None
    min_budget: int = 1

    def validate(self, n: int) -> None:
        if self.k < 2:
            raise ParameterError(f"k must be at least 2, got {self.k}")
        if self.k > n:
            raise ParameterError(f"k={self.k} exceeds the number of vertices n={n}")
        if self.t < 0:
            raise ParameterError(f"t must be non-negative, got {self.t}")
        for name in ("a", "d", "min_budget"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ParameterError(f"{name} must be non-negative, got {value}")


@dataclass(frozen=True)
class ChunkParams:
    """One run of sorted positions ``start..end`` (inclusive)."""

    start: int
    end: int
    anchor: int = 0
    a: int = 0
    d: int = 0
    window: tuple[int, int] = (0, 0)

    @property
    def size(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class ChangeVector:
    """Signed per-vertex degree change, indexed by vertex id."""

    theta: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.theta)

    def __getitem__(self, v: int) -> int:
        return self.theta[v]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.theta, dtype=np.int64)

    @property
    def total(self) -> int:
        return sum(self.theta)

    @property
    def l1(self) -> int:
        return sum(abs(x) for x in self.theta)


@dataclass(frozen=True)
class AnonymizedSequence:
    """Result of :func:`anonymize_sequence`.

    Chunk positions refer to ``source`` (the input sequence); ``target`` is
    re-sorted descending.
    """

    source: DegreeSequence
    target: DegreeSequence
    chunks: list[ChunkParams]
    theta: ChangeVector
    parity_repaired: bool = False

    def caps(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-vertex addition and deletion caps taken from the chunk budgets."""
        order = np.asarray(self.source.order, dtype=np.int64)
        a = np.zeros(len(order), dtype=np.int64)
        d = np.zeros(len(order), dtype=np.int64)
        for chunk in self.chunks:
            members = order[chunk.start:chunk.end + 1]
            a[members] = chunk.a
            d[members] = chunk.d
        return a, d


def partition_chunks(n: int, k: int) -> list[tuple[int, int]]:
    """Split positions ``0..n-1`` into consecutive runs of ``k``.

    The last run absorbs the remainder, so its size lies in ``[k, 2k-1]``.
    """
    if k < 1:
        raise ParameterError(f"k must be positive, got {k}")
    if k > n:
        raise ParameterError(f"k={k} exceeds the number of positions n={n}")
    count = n // k
    runs = [(i * k, i * k + k - 1) for i in range(count)]
    runs[-1] = (runs[-1][0], n - 1)
    return runs


def choose_anchor(values: np.ndarray) -> int:
    """Member value closest to the mean; ties go to the larger value."""
    # compare |v - mean| scaled by the member count to stay in integers
    size = len(values)
    total = int(values.sum())
    dist = np.abs(values * size - total)
    best = dist.min()
    return int(values[dist == best].max())


def choose_window(values: np.ndarray, anchor: int, t: int, ceiling: int) -> tuple[int, int]:
    """Width-``t`` window containing ``anchor`` that moves ``values`` the least.

    The window is cut to ``[0, ceiling]``. The clamp cost is convex and
    piecewise linear in the window start, so only breakpoints and the ends
    of the admissible range are candidates. Ties go to the highest window.
    """
    if t == 0:
        return anchor, anchor
    lo_min, lo_max = anchor - t, anchor
    cand = np.concatenate(([lo_min, lo_max], values, values - t))
    cand = np.unique(cand[(cand >= lo_min) & (cand <= lo_max)])
    lows = np.maximum(cand, 0)[:, None]
    highs = np.minimum(cand + t, ceiling)[:, None]
    cost = (np.maximum(lows - values, 0) + np.maximum(values - highs, 0)).sum(axis=1)
    best = np.flatnonzero(cost == cost.min())[-1]
    return int(lows[best, 0]), int(highs[best, 0])


def anonymize_sequence(
    seq: DegreeSequence,
    params: AnonymizationParams,
    *,
    parity_repair: bool = False,
) -> AnonymizedSequence:
    """Make ``seq`` k-anonymous within tolerance ``t``.

    With ``parity_repair`` set, a target whose degree sum has the wrong
    parity for a graph is fixed by the cheapest single-unit change that keeps
    every run inside its window (at ``t == 0``, by shifting one odd-sized run).
    """
    n = len(seq)
    params.validate(n)
    values = np.asarray(seq.values, dtype=np.int64)
    # n - 1 for any sequence taken from a graph; never below the input
    ceiling = max(n - 1, int(values.max()))
    target = values.copy()
    runs = partition_chunks(n, params.k)
    windows: list[tuple[int, int]] = []
    anchors: list[int] = []
    for start, end in runs:
        members = values[start:end + 1]
        anchor = choose_anchor(members)
        lo, hi = choose_window(members, anchor, params.t, ceiling)
        target[start:end + 1] = np.clip(members, lo, hi)
        anchors.append(anchor)
        windows.append((lo, hi))

    repaired = False
    if parity_repair and (target - values).sum() % 2:
        _repair_parity(values, target, runs, windows, anchors, ceiling)
        repaired = True

    chunks = []
    for (start, end), anchor, window in zip(runs, anchors, windows):
        need = int(np.abs(target[start:end + 1] - values[start:end + 1]).max())
        a = max(need, params.min_budget) if params.a is None else params.a
        d = a if params.d is None else params.d
        chunks.append(ChunkParams(start, end, anchor, a, d, window))

    order = np.asarray(seq.order, dtype=np.int64)
    per_vertex = np.empty(n, dtype=np.int64)
    per_vertex[order] = target
    # stable re-sort: equal targets keep their source positions
    position = np.empty(n, dtype=np.int64)
    position[order] = np.arange(n)
    target_seq = DegreeSequence.from_vertex_values(per_vertex, tiebreak=position)
    theta = change_vector(seq, target_seq)
    return AnonymizedSequence(seq, target_seq, chunks, theta, parity_repaired=repaired)


def _repair_parity(
    values: np.ndarray,
    target: np.ndarray,
    runs: list[tuple[int, int]],
    windows: list[tuple[int, int]],
    anchors: list[int],
    ceiling: int,
) -> None:
    # Sum(theta) and Sum|theta| share parity, so any fix costs at least 1.
    if all(lo == hi for lo, hi in windows):
        best = None
        for idx, (start, end) in enumerate(runs):
            if (end - start + 1) % 2 == 0:
                continue
            for step in (1, -1):
                new = anchors[idx] + step
                if not 0 <= new <= ceiling:
                    continue
                members = values[start:end + 1]
                delta = int(np.abs(members - new).sum() - np.abs(members - anchors[idx]).sum())
                key = (delta, idx, -step)
                if best is None or key < best[0]:
                    best = (key, idx, new)
        if best is None:
            raise ParameterError("no parity-preserving target exists for these parameters")
        _, idx, new = best
        start, end = runs[idx]
        target[start:end + 1] = new
        anchors[idx] = new
        windows[idx] = (new, new)
        return

    theta = target - values
    pos_odd = int(theta[theta > 0].sum()) % 2 == 1
    # Prefer a step that also evens out the positive and negative totals, so
    # additions and deletions can each pair up among themselves.
    preferred = 1 if pos_odd else -1
    best = None
    for idx, (start, end) in enumerate(runs):
        lo, hi = windows[idx]
        cap = int(np.abs(theta[start:end + 1]).max())
        for pos in range(start, end + 1):
            for step in (1, -1):
                new = target[pos] + step
                # a clamped entry sits on a window edge, so stepping toward
                # its source value always fails this test
                if not (lo <= new <= hi):
                    continue
                change = int(new - values[pos])
                key = (step != preferred, max(abs(change) - cap, 0), pos)
                if best is None or key < best[0]:
                    best = (key, pos, new)
    if best is None:
        raise ParameterError("no parity-preserving target exists for these parameters")
    _, pos, new = best
    target[pos] = new


def change_vector(seq: DegreeSequence, target: DegreeSequence) -> ChangeVector:
    """Per-vertex ``target - source`` under each sequence's own vertex mapping."""
    if len(seq) != len(target):
        raise ParameterError(f"sequence lengths differ: {len(seq)} vs {len(target)}")
    diff = target.by_vertex() - seq.by_vertex()
    return ChangeVector(tuple(int(x) for x in diff))


def verify_k_anonymous(values: DegreeSequence | np.ndarray | list[int], k: int, t: int) -> bool:
    """True iff every entry has at least ``k - 1`` other entries within ``t``."""
    if isinstance(values, DegreeSequence):
        values = values.values
    arr = np.sort(np.asarray(values, dtype=np.int64))
    if len(arr) == 0:
        return True
    lo = np.searchsorted(arr, arr - t, side="left")
    hi = np.searchsorted(arr, arr + t, side="right")
    return bool(((hi - lo - 1) >= k - 1).all())
