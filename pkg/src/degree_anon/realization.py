"""Realize a per-vertex degree change on a graph by a minimum edit set.

Every unordered vertex pair gets one binary variable: an addition variable
when the pair is a non-edge, a deletion variable when it is an edge. Vertex
``v`` must satisfy ``adds(v) - dels(v) = theta[v]`` (plus slack in relaxed
mode), ``adds(v) <= a(v)`` and ``dels(v) <= d(v)``. Additions and deletions
live on disjoint pairs, so a plan can never add an edge that it also
deletes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .anonymizer import ChangeVector
from .errors import InfeasibleError, SolverTimeoutError
from .graph import EditPlan, Graph, Pair
from .ilp import IlpModel, Solution, solve, solve_auto, solve_highs
from .ilp.bnb import DEFAULT_NODE_LIMIT, DEFAULT_TIME_LIMIT

Caps = tuple[Sequence[int], Sequence[int]]


@dataclass(frozen=True)
class RealizationMode:
    mode: str = "relaxed"
    lam: Fraction | float = 1

    def __post_init__(self) -> None:
        if self.mode not in ("strict", "relaxed"):
            raise ValueError(f"mode must be 'strict' or 'relaxed', got {self.mode!r}")
        if not self.lam > 0:
            raise ValueError("slack penalty must be positive")


STRICT = RealizationMode("strict")
RELAXED = RealizationMode("relaxed")


@dataclass
class RealizationModel:
    ilp: IlpModel
    n: int
    pairs: list[Pair]
    is_edge: np.ndarray
    theta: np.ndarray
    add_cap: np.ndarray
    del_cap: np.ndarray
    slack_start: int | None = None  # index of s+(0); s-(v) follows all s+

    @property
    def relaxed(self) -> bool:
        return self.slack_start is not None


@dataclass
class Realization:
    plan: EditPlan
    objective: float
    nodes_explored: int
    status: str = "optimal"


def _theta_array(theta: ChangeVector | Sequence[int]) -> np.ndarray:
    if isinstance(theta, ChangeVector):
        return theta.as_array()
    return np.asarray(theta, dtype=np.int64)


def _caps_arrays(n: int, caps: Caps | None) -> tuple[np.ndarray, np.ndarray]:
    if caps is None:
        full = np.full(n, max(n - 1, 0), dtype=np.int64)
        return full, full.copy()
    a, d = (np.asarray(c, dtype=np.int64) for c in caps)
    if a.shape != (n,) or d.shape != (n,):
        raise ValueError("caps must give one addition and one deletion cap per vertex")
    return a, d


def _build(g: Graph, theta: np.ndarray, caps: Caps | None, mode: RealizationMode | None) -> RealizationModel:
    n = g.n
    if theta.shape != (n,):
        raise ValueError(f"theta has {len(theta)} entries for {n} vertices")
    add_cap, del_cap = _caps_arrays(n, caps)
    relaxed = mode is not None and mode.mode == "relaxed"
    model = IlpModel(name="relaxed_realization" if relaxed else "strict_realization")
    pairs = list(itertools.combinations(range(n), 2))
    is_edge = np.fromiter((g.has_edge(u, v) for u, v in pairs), dtype=bool, count=len(pairs))
    balance: list[dict[int, float]] = [{} for _ in range(n)]
    adds: list[dict[int, float]] = [{} for _ in range(n)]
    dels: list[dict[int, float]] = [{} for _ in range(n)]
    for (u, v), edge in zip(pairs, is_edge):
        if edge:
            # a zero cap at either end pins the variable
            hi = 1 if del_cap[u] > 0 and del_cap[v] > 0 else 0
            j = model.add_var(f"del_{u}_{v}", 0, hi, 1)
            balance[u][j] = balance[v][j] = -1
            dels[u][j] = dels[v][j] = 1
        else:
            hi = 1 if add_cap[u] > 0 and add_cap[v] > 0 else 0
            j = model.add_var(f"add_{u}_{v}", 0, hi, 1)
            balance[u][j] = balance[v][j] = 1
            adds[u][j] = adds[v][j] = 1

    slack_start = None
    if relaxed:
        lam = float(mode.lam)
        slack_start = model.num_vars
        for v in range(n):
            model.add_var(f"sp_{v}", 0, n, lam)
        for v in range(n):
            model.add_var(f"sn_{v}", 0, n, lam)
        for v in range(n):
            balance[v][slack_start + v] = -1
            balance[v][slack_start + n + v] = 1

    for v in range(n):
        model.add_constraint(balance[v], "=", int(theta[v]), f"deg_{v}")
    for v in range(n):
        model.add_constraint(adds[v], "<=", int(add_cap[v]), f"addcap_{v}")
        model.add_constraint(dels[v], "<=", int(del_cap[v]), f"delcap_{v}")
    if not relaxed:
        # Each addition serves two vertices, so #additions >= ceil(sum theta+ / 2),
        # likewise for deletions. Valid for every integer solution and
        # tighter than the LP when a total is odd.
        need_add = int(np.clip(theta, 0, None).sum())
        need_del = int(np.clip(-theta, 0, None).sum())
        add_vars = {j: 1 for j in range(len(pairs)) if not is_edge[j]}
        del_vars = {j: 1 for j in range(len(pairs)) if is_edge[j]}
        model.add_constraint(add_vars, ">=", (need_add + 1) // 2, "min_additions")
        model.add_constraint(del_vars, ">=", (need_del + 1) // 2, "min_deletions")
    return RealizationModel(model, n, pairs, is_edge, theta.copy(), add_cap, del_cap, slack_start)


def build_strict_model(g: Graph, theta: ChangeVector | Sequence[int], caps: Caps | None = None) -> RealizationModel:
    return _build(g, _theta_array(theta), caps, None)


def build_relaxed_model(
    g: Graph,
    theta: ChangeVector | Sequence[int],
    caps: Caps | None = None,
    mode: RealizationMode = RELAXED,
) -> RealizationModel:
    """Relaxed model: ``adds - dels = theta + s+ - s-``, slack costs ``lam`` per unit."""
    if mode.mode != "relaxed":
        mode = RealizationMode("relaxed", mode.lam)
    return _build(g, _theta_array(theta), caps, mode)


def decode(rm: RealizationModel, assignment: np.ndarray) -> EditPlan:
    k = len(rm.pairs)
    chosen = np.flatnonzero(assignment[:k] > 0)
    additions = [rm.pairs[j] for j in chosen if not rm.is_edge[j]]
    deletions = [rm.pairs[j] for j in chosen if rm.is_edge[j]]
    if rm.slack_start is None:
        slack = np.zeros(rm.n, dtype=np.int64)
    else:
        s = rm.slack_start
        slack = assignment[s:s + rm.n] - assignment[s + rm.n:s + 2 * rm.n]
    return EditPlan(frozenset(additions), frozenset(deletions), tuple(int(x) for x in slack))


def strict_certificate(g: Graph, theta: np.ndarray, caps: Caps | None) -> tuple[str, str] | None:
    """Cheap proof that the strict model has no solution, if one applies."""
    total = int(theta.sum())
    if total % 2:
        return "odd-parity", f"sum of degree changes is {total}, which is odd; every edit changes the degree sum by 2"
    target = g.degrees + theta
    bad = np.flatnonzero((target < 0) | (target > g.n - 1))
    if len(bad):
        v = int(bad[0])
        return "degree-bound", f"vertex {v} would need degree {int(target[v])}, outside [0, {g.n - 1}]"
    add_cap, del_cap = _caps_arrays(g.n, caps)
    over = np.flatnonzero((theta > add_cap) | (-theta > del_cap))
    if len(over):
        v = int(over[0])
        return "cap", (
            f"vertex {v} needs a change of {int(theta[v])} but may add at most {int(add_cap[v])}"
            f" and delete at most {int(del_cap[v])} edges"
        )
    return None


def realize(
    g: Graph,
    theta: ChangeVector | Sequence[int],
    caps: Caps | None = None,
    mode: RealizationMode = RELAXED,
    *,
    time_limit: float = DEFAULT_TIME_LIMIT,
    node_limit: int = DEFAULT_NODE_LIMIT,
    solver: str = "auto",
) -> Realization:
    """Solve the realization program and decode the optimal edit plan.

    ``solver`` is ``"bnb"`` (built-in branch-and-bound), ``"highs"`` or
    ``"auto"`` (built-in first, HiGHS after a fixed node budget).

    Raises :class:`InfeasibleError` when the strict program has no solution
    and :class:`SolverTimeoutError` when the limits stop the search first.
    """
    th = _theta_array(theta)
    if mode.mode == "strict":
        cert = strict_certificate(g, th, caps)
        if cert is not None:
            raise InfeasibleError(*cert)
        rm = build_strict_model(g, th, caps)
    else:
        rm = build_relaxed_model(g, th, caps, mode)
    if solver == "bnb":
        sol: Solution = solve(rm.ilp, time_limit=time_limit, node_limit=node_limit)
    elif solver == "highs":
        sol = solve_highs(rm.ilp, time_limit=time_limit)
    elif solver == "auto":
        sol = solve_auto(rm.ilp, time_limit=time_limit, node_limit=node_limit)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    if sol.status == "infeasible":
        raise InfeasibleError("solver", "no edit set realizes the requested degree changes within the caps")
    if sol.status == "timeout":
        raise SolverTimeoutError(
            f"solver stopped after {sol.nodes_explored} nodes; best bound {sol.bound}",
            bound=sol.bound,
            incumbent=sol.objective,
        )
    return Realization(decode(rm, sol.assignment), float(sol.objective), sol.nodes_explored)
