"""Bounded-variable primal simplex on a dense tableau.

Solves ``min c @ x  s.t.  A x = b,  lo <= x <= hi`` with finite ``lo`` and
possibly infinite ``hi``. Nonbasic variables sit at one of their bounds, so
box constraints never become rows. Phase 1 minimizes the sum of one
artificial per row; both phases use Bland's rule, which cannot cycle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-9
COST_TOL = 1e-9
FEAS_TOL = 1e-7


@dataclass
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    objective: float = float("nan")
    iterations: int = 0


class _Tableau:
    def __init__(self, A: np.ndarray, b: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> None:
        m, n = A.shape
        self.m, self.n = m, n
        x = lo.copy()
        resid = b - A @ x
        sign = np.where(resid >= 0, 1.0, -1.0)
        # columns: structural, then one artificial per row
        self.T = np.hstack([A * sign[:, None], np.eye(m)])
        self.lo = np.concatenate([lo, np.zeros(m)])
        self.hi = np.concatenate([hi, np.full(m, np.inf)])
        self.basis = np.arange(n, n + m)
        self.beta = np.abs(resid)
        self.at_upper = np.zeros(n + m, dtype=bool)
        self.iterations = 0

    def values(self) -> np.ndarray:
        x = np.where(self.at_upper, self.hi, self.lo)
        x[self.basis] = self.beta
        return x

    def run(self, cost: np.ndarray, max_iter: int) -> str:
        is_basic = np.zeros(len(cost), dtype=bool)
        while True:
            if self.iterations >= max_iter:
                return "iteration_limit"
            is_basic[:] = False
            is_basic[self.basis] = True
            reduced = cost - cost[self.basis] @ self.T
            movable = (~is_basic) & (self.hi > self.lo)
            improving = movable & (
                ((~self.at_upper) & (reduced < -COST_TOL)) | (self.at_upper & (reduced > COST_TOL))
            )
            candidates = np.flatnonzero(improving)
            if len(candidates) == 0:
                return "optimal"
            j = int(candidates[0])  # Bland: lowest index
            direction = -1.0 if self.at_upper[j] else 1.0
            if not self._step(j, direction):
                return "unbounded"
            self.iterations += 1

    def _step(self, j: int, direction: float) -> bool:
        col = self.T[:, j]
        alpha = direction * col
        lo_b = self.lo[self.basis]
        hi_b = self.hi[self.basis]
        ratios = np.full(self.m, np.inf)
        dec = alpha > PIVOT_TOL
        inc = alpha < -PIVOT_TOL
        ratios[dec] = (self.beta[dec] - lo_b[dec]) / alpha[dec]
        ratios[inc] = (hi_b[inc] - self.beta[inc]) / (-alpha[inc])
        ratios = np.maximum(ratios, 0.0)
        flip = self.hi[j] - self.lo[j]
        best = ratios.min() if self.m else np.inf
        if flip <= best:
            if not np.isfinite(flip):
                return False
            self.beta -= flip * alpha
            self.at_upper[j] = not self.at_upper[j]
            return True
        # Bland: among tied rows leave the lowest-indexed basic variable
        tied = np.flatnonzero(ratios <= best + 1e-12)
        r = int(tied[np.argmin(self.basis[tied])])
        leaving = int(self.basis[r])
        entering_value = (self.hi[j] if self.at_upper[j] else self.lo[j]) + direction * best
        self.beta -= best * alpha
        self.at_upper[leaving] = bool(inc[r])
        self.at_upper[j] = False
        pivot = self.T[r, j]
        self.T[r] /= pivot
        factors = self.T[:, j].copy()
        factors[r] = 0.0
        self.T -= np.outer(factors, self.T[r])
        self.basis[r] = j
        self.beta[r] = entering_value
        return True


def solve_lp(
    c: np.ndarray,
    A: np.ndarray,
    b: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    max_iter: int = 100_000,
) -> LpResult:
    """Solve the equality-form LP; ``lo`` must be finite."""
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float).reshape(-1, len(c))
    b = np.asarray(b, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(lo > hi + FEAS_TOL):
        return LpResult("infeasible")
    m, n = A.shape
    tab = _Tableau(A, b, lo, hi)

    phase1 = np.concatenate([np.zeros(n), np.ones(m)])
    status = tab.run(phase1, max_iter)
    if status == "iteration_limit":
        raise RuntimeError("simplex iteration limit reached in phase 1")
    if tab.values()[n:].sum() > FEAS_TOL * max(1, m):
        return LpResult("infeasible", iterations=tab.iterations)

    # artificials are pinned at zero for phase 2
    tab.hi[n:] = 0.0
    tab.at_upper[n:] = False
    tab.beta = np.where(tab.basis >= n, 0.0, tab.beta)
    phase2 = np.concatenate([c, np.zeros(m)])
    status = tab.run(phase2, max_iter)
    if status == "iteration_limit":
        raise RuntimeError("simplex iteration limit reached in phase 2")
    if status == "unbounded":
        return LpResult("unbounded", iterations=tab.iterations)
    x = tab.values()[:n]
    return LpResult("optimal", x, float(c @ x), tab.iterations)
