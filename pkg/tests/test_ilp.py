import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from degree_anon.ilp import (
    IlpModel,
    Relaxation,
    from_lp_format,
    lp_bound,
    solve,
    solve_auto,
    solve_highs,
    solve_lp,
    to_lp_format,
)

from oracles import enumerate_ilp


def binary_model(costs, rows):
    """rows: (coeffs, sense, rhs) with coeffs as {index: value}."""
    m = IlpModel()
    for j, c in enumerate(costs):
        m.add_var(f"x{j}", 0, 1, c)
    for coeffs, sense, rhs in rows:
        m.add_constraint(coeffs, sense, rhs)
    return m


@st.composite
def small_models(draw, max_vars=7):
    nv = draw(st.integers(1, max_vars))
    m = IlpModel()
    for j in range(nv):
        hi = draw(st.integers(0, 2))
        m.add_var(f"v{j}", 0, hi, draw(st.integers(-3, 5)))
    for _ in range(draw(st.integers(0, 4))):
        support = draw(st.lists(st.integers(0, nv - 1), min_size=1, max_size=nv, unique=True))
        coeffs = {j: draw(st.integers(-2, 2)) for j in support}
        m.add_constraint(coeffs, draw(st.sampled_from(["=", "<=", ">="])), draw(st.integers(-2, 4)))
    return m


class TestSimplex:
    def test_simple_equality(self):
        res = solve_lp([1, 1], [[1, 1]], [1], np.zeros(2), np.ones(2))
        assert res.status == "optimal" and res.objective == pytest.approx(1)

    def test_infeasible(self):
        res = solve_lp([1], [[1]], [2], np.zeros(1), np.ones(1))
        assert res.status == "infeasible"

    def test_unbounded(self):
        res = solve_lp([-1, 0], [[1, -1]], [0], np.zeros(2), np.full(2, np.inf))
        assert res.status == "unbounded"

    def test_no_rows(self):
        res = solve_lp([1, -1], np.zeros((0, 2)), [], np.zeros(2), np.array([3.0, 2.0]))
        assert res.status == "optimal"
        assert list(res.x) == [0.0, 2.0]

    def test_degenerate_does_not_cycle(self):
        # a classic degenerate LP (Beale) rewritten with slack columns
        c = [-0.75, 150, -0.02, 6, 0, 0, 0]
        A = [
            [0.25, -60, -0.04, 9, 1, 0, 0],
            [0.5, -90, -0.02, 3, 0, 1, 0],
            [0, 0, 1, 0, 0, 0, 1],
        ]
        b = [0, 0, 1]
        res = solve_lp(c, A, b, np.zeros(7), np.full(7, np.inf))
        assert res.status == "optimal"
        assert res.objective == pytest.approx(-0.05)

    @settings(max_examples=150, deadline=None)
    @given(st.data())
    def test_matches_highs(self, data):
        nv = data.draw(st.integers(1, 6))
        nr = data.draw(st.integers(0, 4))
        c = np.array(data.draw(st.lists(st.integers(-4, 4), min_size=nv, max_size=nv)), float)
        A = np.array([data.draw(st.lists(st.integers(-3, 3), min_size=nv, max_size=nv)) for _ in range(nr)], float)
        A = A.reshape(nr, nv)
        b = np.array(data.draw(st.lists(st.integers(-3, 6), min_size=nr, max_size=nr)), float)
        hi = np.array(data.draw(st.lists(st.integers(0, 3), min_size=nv, max_size=nv)), float)
        lo = np.zeros(nv)
        mine = solve_lp(c, A, b, lo, hi)
        ref = linprog(c, A_eq=A if nr else None, b_eq=b if nr else None, bounds=list(zip(lo, hi)), method="highs")
        if ref.status == 2:
            assert mine.status == "infeasible"
        else:
            assert mine.status == "optimal"
            assert mine.objective == pytest.approx(ref.fun, abs=1e-7)
            assert np.allclose(A @ mine.x, b, atol=1e-7)
            assert np.all(mine.x >= lo - 1e-9) and np.all(mine.x <= hi + 1e-9)


class TestLpBound:
    def test_fixed_to_one(self):
        assert lp_bound(binary_model([1], [({0: 1}, "=", 1)])) == pytest.approx(1)

    def test_cover(self):
        assert lp_bound(binary_model([1, 1], [({0: 1, 1: 1}, ">=", 1)])) == pytest.approx(1)

    def test_infeasible_is_inf(self):
        assert lp_bound(binary_model([1], [({0: 1}, "=", 2)])) == math.inf

    @settings(max_examples=80, deadline=None)
    @given(small_models())
    def test_backends_agree(self, model):
        assert lp_bound(model, "native") == pytest.approx(lp_bound(model, "highs"), abs=1e-7)

    @settings(max_examples=80, deadline=None)
    @given(small_models())
    def test_bound_below_optimum(self, model):
        best = enumerate_ilp(model)
        if best is not None:
            assert lp_bound(model) <= best + 1e-7


class TestSolve:
    def test_zero_model(self):
        sol = solve(binary_model([1, 1, 1], []))
        assert sol.status == "optimal" and sol.objective == 0
        assert list(sol.assignment) == [0, 0, 0]

    def test_shared_variable(self):
        sol = solve(binary_model([1, 1, 1], [({0: 1, 1: 1}, "=", 1), ({1: 1, 2: 1}, "=", 1)]))
        assert sol.objective == 1
        assert list(sol.assignment) == [0, 1, 0]

    def test_contradiction(self):
        sol = solve(binary_model([1], [({0: 1}, "=", 1), ({0: 1}, "=", 0)]))
        assert sol.status == "infeasible"

    def test_integrality_gap(self):
        # odd cycle cover: LP gives 1.5, integers need 2
        rows = [({0: 1, 1: 1}, ">=", 1), ({1: 1, 2: 1}, ">=", 1), ({0: 1, 2: 1}, ">=", 1)]
        m = binary_model([1, 1, 1], rows)
        assert lp_bound(m) == pytest.approx(1.5)
        sol = solve(m)
        assert sol.objective == 2 and sol.bound == 2

    def test_node_limit_reports_timeout(self):
        rows = [({i: 1, (i + 1) % 9: 1}, ">=", 1) for i in range(9)]
        sol = solve(binary_model([1] * 9, rows), node_limit=1)
        assert sol.status == "timeout"
        assert sol.bound <= 5

    def test_as_dict(self):
        m = binary_model([1], [({0: 1}, "=", 1)])
        sol = solve(m)
        assert sol.as_dict(m) == {"x0": 1}

    @settings(max_examples=200, deadline=None)
    @given(small_models())
    def test_matches_enumeration(self, model):
        best = enumerate_ilp(model)
        sol = solve(model)
        if best is None:
            assert sol.status == "infeasible"
        else:
            assert sol.status == "optimal"
            assert sol.objective == pytest.approx(best)
            assert sol.bound == pytest.approx(best)
            assert model.is_feasible(sol.assignment)
            lo, hi = model.bounds()
            assert np.all(sol.assignment >= lo) and np.all(sol.assignment <= hi)

    @settings(max_examples=60, deadline=None)
    @given(small_models())
    def test_deterministic(self, model):
        a, b = solve(model), solve(model)
        assert a.status == b.status
        if a.assignment is not None:
            assert np.array_equal(a.assignment, b.assignment)

    @settings(max_examples=60, deadline=None)
    @given(small_models())
    def test_highs_and_auto_agree(self, model):
        best = enumerate_ilp(model)
        for sol in (solve_highs(model), solve_auto(model)):
            if best is None:
                assert sol.status == "infeasible"
            else:
                assert sol.objective == pytest.approx(best)

    @settings(max_examples=60, deadline=None)
    @given(small_models(max_vars=6))
    def test_node_count_bounded_by_full_tree(self, model):
        sol = solve(model, backend="native")
        # every branching splits one integer domain; the box has this many leaves
        leaves = math.prod(int(h - l) + 1 for l, h in zip(model.lower, model.upper))
        assert sol.nodes_explored <= 2 * leaves + 1


class TestRelaxation:
    def test_fixed_variables_are_eliminated(self):
        m = binary_model([1, 1], [({0: 1, 1: 1}, "=", 1)])
        relax = Relaxation(m, "native")
        res = relax.solve(np.array([1.0, 0.0]), np.array([1.0, 0.0]))
        assert res.status == "optimal" and list(res.x) == [1.0, 0.0]
        res = relax.solve(np.array([1.0, 1.0]), np.array([1.0, 1.0]))
        assert res.status == "infeasible"

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            Relaxation(binary_model([1], []), "cplex")


class TestModel:
    def test_rejects_unknown_variable(self):
        m = IlpModel()
        m.add_var("x")
        with pytest.raises(ValueError):
            m.add_constraint({3: 1}, "=", 1)

    def test_rejects_infinite_bound(self):
        with pytest.raises(ValueError):
            IlpModel().add_var("x", 0, math.inf)

    def test_objective_step(self):
        m = IlpModel()
        m.add_var("x", 0, 1, 1)
        m.add_var("y", 0, 1, 0.5)
        assert m.objective_step() == 0.5
        m.add_var("z", 0, 1, math.pi)
        assert m.objective_step() is None

    def test_violation(self):
        m = binary_model([1, 1], [({0: 1, 1: 1}, "=", 1)])
        assert m.violation(np.array([1, 1])) == 1
        assert m.is_feasible(np.array([0, 1]))


class TestLpFormat:
    def test_sections(self):
        m = binary_model([1, 0], [({0: 1, 1: -1}, "=", 0)])
        text = to_lp_format(m)
        for header in ("Minimize", "Subject To", "Bounds", "Binaries", "End"):
            assert header in text

    @settings(max_examples=100, deadline=None)
    @given(small_models())
    def test_round_trip(self, model):
        back = from_lp_format(to_lp_format(model))
        assert back.names == model.names
        assert back.lower == [float(x) for x in model.lower]
        assert back.upper == [float(x) for x in model.upper]
        assert back.objective == [float(c) for c in model.objective]
        assert len(back.constraints) == len(model.constraints)
        for a, b in zip(back.constraints, model.constraints):
            assert a.sense == b.sense and a.rhs == b.rhs
            assert {j: c for j, c in a.coeffs.items() if c} == {j: c for j, c in b.coeffs.items() if c}

    def test_parse_error(self):
        with pytest.raises(ValueError):
            from_lp_format("Minimize\n obj: x\nSubject To\n c0: x ?? 1\nEnd\n")
