"""HiGHS branch-and-cut (through scipy) behind the :class:`Solution` contract."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from .bnb import DEFAULT_NODE_LIMIT, DEFAULT_TIME_LIMIT, Solution, solve
from .model import IlpModel

# nodes granted to the built-in search before handing over to HiGHS
HANDOFF_NODES = 64


def solve_highs(model: IlpModel, time_limit: float = DEFAULT_TIME_LIMIT) -> Solution:
    A_eq, b_eq, A_ub, b_ub = model.matrices()
    lo, hi = model.bounds()
    constraints = []
    if A_eq.shape[0]:
        constraints.append(LinearConstraint(A_eq, b_eq, b_eq))
    if A_ub.shape[0]:
        constraints.append(LinearConstraint(A_ub, -np.inf, b_ub))
    res = milp(
        model.cost_vector(),
        constraints=constraints,
        integrality=np.ones(model.num_vars),
        bounds=Bounds(lo, hi),
        options={"time_limit": float(time_limit), "presolve": True},
    )
    nodes = int(getattr(res, "mip_node_count", 0) or 0)
    if res.status == 0:
        x = np.round(res.x).astype(np.int64)
        if not model.is_feasible(x):
            raise RuntimeError("HiGHS returned an assignment that violates the model")
        value = model.objective_value(x)
        return Solution("optimal", x, value, value, nodes)
    if res.status == 2:
        return Solution("infeasible", None, None, math.inf, nodes)
    if res.status == 1:
        x = None if res.x is None else np.round(res.x).astype(np.int64)
        value = None if x is None else model.objective_value(x)
        bound = float(getattr(res, "mip_dual_bound", -math.inf))
        return Solution("timeout", x, value, bound, nodes)
    raise RuntimeError(f"HiGHS failed: {res.message}")


def solve_auto(
    model: IlpModel,
    time_limit: float = DEFAULT_TIME_LIMIT,
    node_limit: int = DEFAULT_NODE_LIMIT,
    handoff_nodes: int = HANDOFF_NODES,
) -> Solution:
    """Built-in branch-and-bound first; HiGHS if it has not finished in time.

    The handoff is by node count, so the outcome does not depend on machine
    speed.
    """
    sol = solve(model, time_limit=time_limit, node_limit=min(node_limit, handoff_nodes))
    if sol.status != "timeout" or node_limit <= handoff_nodes:
        return sol
    fallback = solve_highs(model, time_limit=time_limit)
    fallback.nodes_explored += sol.nodes_explored
    return fallback
