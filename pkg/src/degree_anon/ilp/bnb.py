"""LP relaxations and best-first branch-and-bound for :class:`IlpModel`."""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .model import IlpModel
from .simplex import LpResult, solve_lp

INT_TOL = 1e-6
OBJ_EPS = 1e-9
NATIVE_MAX_COLUMNS = 250
DEFAULT_TIME_LIMIT = 60.0
DEFAULT_NODE_LIMIT = 1_000_000


@dataclass
class Solution:
    status: str  # "optimal" | "infeasible" | "timeout"
    assignment: np.ndarray | None
    objective: float | None
    bound: float
    nodes_explored: int

    def as_dict(self, model: IlpModel) -> dict[str, int]:
        if self.assignment is None:
            return {}
        return {name: int(v) for name, v in zip(model.names, self.assignment)}


class Relaxation:
    """Continuous relaxation of a model under changing variable bounds."""

    def __init__(self, model: IlpModel, backend: str = "auto") -> None:
        if backend not in ("auto", "native", "highs"):
            raise ValueError(f"unknown LP backend {backend!r}")
        self.model = model
        self.c = model.cost_vector()
        A_eq, b_eq, A_ub, b_ub = model.matrices()
        self.A_eq, self.b_eq = A_eq.tocsc(), b_eq
        self.A_ub, self.b_ub = A_ub.tocsc(), b_ub
        self.backend = backend

    def solve(self, lo: np.ndarray, hi: np.ndarray) -> LpResult:
        free = np.flatnonzero(hi > lo)
        backend = self.backend
        if backend == "auto":
            columns = len(free) + self.A_ub.shape[0]
            backend = "native" if columns <= NATIVE_MAX_COLUMNS else "highs"
        if backend == "native":
            return self._native(lo, hi, free)
        return self._highs(lo, hi)

    def _native(self, lo: np.ndarray, hi: np.ndarray, free: np.ndarray) -> LpResult:
        fixed_part = lo.copy()
        fixed_part[free] = 0.0
        b_eq = self.b_eq - self.A_eq @ fixed_part
        b_ub = self.b_ub - self.A_ub @ fixed_part
        E = self.A_eq[:, free]
        U = self.A_ub[:, free]
        # rows that no longer touch a free variable are checked directly
        keep_eq = np.diff(E.tocsr().indptr) > 0
        keep_ub = np.diff(U.tocsr().indptr) > 0
        if np.any(np.abs(b_eq[~keep_eq]) > 1e-9) or np.any(b_ub[~keep_ub] < -1e-9):
            return LpResult("infeasible")
        E, b_eq = E[keep_eq], b_eq[keep_eq]
        U, b_ub = U[keep_ub], b_ub[keep_ub]
        k, m_ub = len(free), U.shape[0]
        if k + m_ub == 0:
            return LpResult("optimal", lo.copy(), float(self.c @ lo), 0)
        A = sp.vstack([
            sp.hstack([E, sp.csc_matrix((E.shape[0], m_ub))]),
            sp.hstack([U, sp.identity(m_ub, format="csc")]),
        ]).toarray() if (E.shape[0] + m_ub) else np.zeros((0, k + m_ub))
        b = np.concatenate([b_eq, b_ub])
        c = np.concatenate([self.c[free], np.zeros(m_ub)])
        lo_f = np.concatenate([lo[free], np.zeros(m_ub)])
        hi_f = np.concatenate([hi[free], np.full(m_ub, np.inf)])
        res = solve_lp(c, A, b, lo_f, hi_f)
        if res.status != "optimal":
            return res
        x = lo.copy()
        x[free] = res.x[:k]
        return LpResult("optimal", x, float(self.c @ x), res.iterations)

    def _highs(self, lo: np.ndarray, hi: np.ndarray) -> LpResult:
        kwargs = {}
        if self.A_eq.shape[0]:
            kwargs.update(A_eq=self.A_eq, b_eq=self.b_eq)
        if self.A_ub.shape[0]:
            kwargs.update(A_ub=self.A_ub, b_ub=self.b_ub)
        res = linprog(self.c, bounds=np.column_stack([lo, hi]), method="highs-ds", **kwargs)
        if res.status == 0:
            return LpResult("optimal", res.x, float(res.fun), int(res.nit))
        if res.status == 2:
            return LpResult("infeasible")
        if res.status == 3:
            return LpResult("unbounded")
        raise RuntimeError(f"LP solver failed: {res.message}")


def lp_bound(model: IlpModel, backend: str = "auto") -> float:
    """Optimal value of the continuous relaxation; ``inf`` when infeasible."""
    lo, hi = model.bounds()
    res = Relaxation(model, backend).solve(lo, hi)
    if res.status == "infeasible":
        return math.inf
    if res.status == "unbounded":
        raise RuntimeError("LP relaxation is unbounded")
    return res.objective


def _branch_variable(x: np.ndarray) -> int | None:
    frac = x - np.floor(x)
    fractional = (frac > INT_TOL) & (frac < 1 - INT_TOL)
    if not fractional.any():
        return None
    score = np.where(fractional, np.abs(frac - 0.5), np.inf)
    return int(np.argmin(score))  # argmin returns the lowest index on ties


def _support_key(x: np.ndarray) -> tuple:
    nz = np.flatnonzero(x)
    return tuple((int(j), int(x[j])) for j in nz)


def solve(
    model: IlpModel,
    time_limit: float = DEFAULT_TIME_LIMIT,
    node_limit: int = DEFAULT_NODE_LIMIT,
    backend: str = "auto",
) -> Solution:
    """Best-first branch-and-bound.

    Nodes are ordered by ``(bound, creation order)``. The branching variable
    is the one whose fractional part is nearest 0.5 (lowest index on ties)
    and the floor child is created first. When every cost is a small
    rational the LP bound is rounded up to the next attainable objective
    value before pruning. Among equal-objective integral leaves the one with
    the lexicographically smallest support is kept.
    """
    start = time.monotonic()
    relax = Relaxation(model, backend)
    step = model.objective_step()

    def rounded(value: float) -> float:
        if step is None:
            return value
        s = float(step)
        return math.ceil(value / s - 1e-6) * s

    lo0, hi0 = model.bounds()
    incumbent: np.ndarray | None = None
    best = math.inf
    heap: list[tuple[float, int, np.ndarray, np.ndarray, np.ndarray]] = []
    counter = 0
    nodes = 0

    def visit(lo: np.ndarray, hi: np.ndarray) -> None:
        nonlocal nodes, counter, incumbent, best
        nodes += 1
        res = relax.solve(lo, hi)
        if res.status == "infeasible":
            return
        if res.status == "unbounded":
            raise RuntimeError("LP relaxation is unbounded")
        x = res.x
        if _branch_variable(x) is None:
            cand = np.round(x).astype(np.int64)
            if not model.is_feasible(cand):
                return
            value = model.objective_value(cand)
            if value < best - OBJ_EPS or (
                value <= best + OBJ_EPS and _support_key(cand) < _support_key(incumbent)
            ):
                incumbent, best = cand, value
            return
        bound = rounded(res.objective)
        if bound >= best - OBJ_EPS:
            return
        heapq.heappush(heap, (bound, counter, lo, hi, x))
        counter += 1

    visit(lo0, hi0)
    timed_out = False
    while heap:
        bound, _, lo, hi, x = heap[0]
        if bound >= best - OBJ_EPS:
            break
        if time.monotonic() - start > time_limit or nodes >= node_limit:
            timed_out = True
            break
        heapq.heappop(heap)
        j = _branch_variable(x)
        floor_hi = hi.copy()
        floor_hi[j] = math.floor(x[j])
        visit(lo, floor_hi)
        ceil_lo = lo.copy()
        ceil_lo[j] = math.ceil(x[j])
        visit(ceil_lo, hi)

    if timed_out:
        open_bound = min(entry[0] for entry in heap)
        return Solution("timeout", incumbent, None if incumbent is None else best, min(open_bound, best), nodes)
    if incumbent is None:
        return Solution("infeasible", None, None, math.inf, nodes)
    return Solution("optimal", incumbent, best, best, nodes)
