"""Graph-level anonymization: sequence phase followed by realization."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .anonymizer import AnonymizationParams, AnonymizedSequence, anonymize_sequence
from .errors import InfeasibleError
from .graph import EditPlan, Graph, apply_edits, degree_sequence
from .ilp.bnb import DEFAULT_NODE_LIMIT, DEFAULT_TIME_LIMIT
from .realization import RELAXED, RealizationMode, realize

# proofs of infeasibility that no budget can lift
_BUDGET_INDEPENDENT = ("odd-parity", "degree-bound")


@dataclass
class AnonymizationResult:
    original: Graph
    anonymized: Graph
    sequence: AnonymizedSequence
    plan: EditPlan
    add_caps: np.ndarray
    del_caps: np.ndarray
    objective: float
    nodes_explored: int
    budget_floor: int


def budget_ladder(start: int, n: int) -> list[int]:
    """Floors tried in turn: ``start``, then doubling, ending at ``n - 1``."""
    top = max(n - 1, 0)
    floors = [min(start, top)]
    while floors[-1] < top:
        floors.append(min(max(2 * floors[-1], 1), top))
    return floors


def anonymize_graph(
    g: Graph,
    params: AnonymizationParams,
    mode: RealizationMode = RELAXED,
    *,
    parity_repair: bool = False,
    time_limit: float = DEFAULT_TIME_LIMIT,
    node_limit: int = DEFAULT_NODE_LIMIT,
    solver: str = "auto",
) -> AnonymizationResult:
    """Anonymize the degree sequence of ``g`` and realize it with minimum edits.

    Budgets derived from the sequence can be too tight for the concrete
    graph: the vertices that must gain an edge may have no free partners
    among the other vertices allowed to gain one. In strict mode, when the
    caller did not fix ``a`` or ``d``, the budget floor is raised
    (1, 2, 4, ... up to ``n - 1``) until the realization program becomes
    feasible. The target sequence never changes, only the caps do.
    """
    seq = degree_sequence(g)
    escalate = mode.mode == "strict" and params.a is None and params.d is None
    floors = budget_ladder(params.min_budget, g.n) if escalate else [params.min_budget]
    last_error: InfeasibleError | None = None
    for floor in floors:
        p = dataclasses.replace(params, min_budget=floor)
        anon = anonymize_sequence(seq, p, parity_repair=parity_repair)
        add_caps, del_caps = anon.caps()
        try:
            result = realize(
                g, anon.theta, (add_caps, del_caps), mode,
                time_limit=time_limit, node_limit=node_limit, solver=solver,
            )
        except InfeasibleError as exc:
            last_error = exc
            if exc.reason in _BUDGET_INDEPENDENT:
                raise
            continue
        return AnonymizationResult(
            original=g,
            anonymized=apply_edits(g, result.plan),
            sequence=anon,
            plan=result.plan,
            add_caps=add_caps,
            del_caps=del_caps,
            objective=result.objective,
            nodes_explored=result.nodes_explored,
            budget_floor=floor,
        )
    assert last_error is not None
    raise last_error
