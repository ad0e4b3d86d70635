from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from capcover.errors import InfeasibleError
from capcover.instance import Instance, MetricSpace, Variant, Ball, generate_random
from capcover.lp import (
    EQ,
    GE,
    LE,
    FractionalSolution,
    LPModel,
    Row,
    build_mmcc_lp,
    check_lp_feasibility,
    dump_lp,
    resolve_basis,
    solve_lp,
)
from capcover.oracle import lp_vertex_optimum, optimal_cover

F = Fraction
random_instances = st.builds(
    generate_random,
    st.integers(1, 7),
    st.integers(1, 5),
    st.sampled_from(list(Variant)),
    st.integers(0, 10**6),
)


def assert_farkas(model, witness):
    """u >= 0 on >= rows, u <= 0 on <= rows, u.A <= 0 per column and u.b > 0."""
    rows = list(model.rows) + [
        Row(("ub",) + tuple(v), {v: F(1)}, LE, model.upper[v]) for v in model.variables if v in model.upper
    ]
    by_name = {r.name: r for r in rows}
    for name, u in witness.items():
        rel = by_name[name].rel
        assert not (rel == GE and u < 0) and not (rel == LE and u > 0)
    for v in model.variables:
        assert sum(u * by_name[n].coeffs.get(v, 0) for n, u in witness.items()) <= 0
    assert sum(u * by_name[n].rhs for n, u in witness.items()) > 0


class TestBuild:
    def test_single_point(self, single):
        model = build_mmcc_lp(single)
        assert model.variables == [("y", 0), ("x", 0, 0)]
        sol = solve_lp(model)
        assert sol.cost == 1 and sol.y == {0: 1} and sol.x == {(0, 0): 1}

    def test_constraint4_by_omission(self, line3):
        model = build_mmcc_lp(line3)
        assert ("x", 0, 2) not in model.index
        assert ("x", 1, 2) in model.index
        names = {r.name[0] for r in model.rows}
        assert names == {"open", "cap", "flow"}
        assert all(model.upper[("y", b)] == 1 for b in (0, 1))

    def test_uncovered_point(self):
        inst = Instance(MetricSpace.from_rows([[0, 5], [5, 0]]), (Ball(0, 0, F(1), 2),), Variant.UNIFORM)
        with pytest.raises(InfeasibleError):
            build_mmcc_lp(inst)

    def test_duplicate_variable_rejected(self):
        v = ("y", 0)
        with pytest.raises(ValueError):
            LPModel("dup", [v, v], {v: F(1)}, [], {})


class TestSolve:
    def test_line3_optimum(self, line3):
        sol = solve_lp(build_mmcc_lp(line3))
        assert sol.cost == F(3, 2)
        assert sol.cost == lp_vertex_optimum(line3)

    def test_line3_relaxation_gap(self, line3):
        assert solve_lp(build_mmcc_lp(line3)).cost < optimal_cover(line3).opt_size

    def test_infeasible_model_has_farkas_witness(self):
        x = ("x", "a", 0)
        model = LPModel("t", [x], {x: F(1)}, [Row("le", {x: F(1)}, LE, F(1)), Row("ge", {x: F(1)}, GE, F(2))], {})
        with pytest.raises(InfeasibleError) as exc:
            solve_lp(model)
        assert_farkas(model, exc.value.witness)

    def test_infeasible_through_upper_bounds(self):
        x, y = ("x", "a", 0), ("y", "a")
        model = LPModel("t", [x, y], {y: F(1)}, [Row("eq", {x: F(1), y: F(1)}, EQ, F(3))], {x: F(1), y: F(1)})
        with pytest.raises(InfeasibleError) as exc:
            solve_lp(model)
        assert_farkas(model, exc.value.witness)

    def test_degenerate_model_terminates(self):
        # many tied ratios; Bland's rule must not cycle
        xs = [("x", i, 0) for i in range(6)]
        rows = [Row(("r", i), {xs[i]: F(1), xs[(i + 1) % 6]: F(-1)}, LE, F(0)) for i in range(6)]
        rows.append(Row("sum", {v: F(1) for v in xs}, GE, F(1)))
        sol = solve_lp(LPModel("deg", xs, {v: F(1) for v in xs}, rows, {}))
        assert sum(sol.x.values()) == 1

    def test_dump_lists_every_row(self, line3):
        model = build_mmcc_lp(line3)
        text = dump_lp(model)
        assert text.count("\n") >= len(model.rows) + 1

    @settings(max_examples=40, deadline=None)
    @given(random_instances)
    def test_optimum_matches_vertex_enumeration(self, inst):
        assert solve_lp(build_mmcc_lp(inst)).cost == lp_vertex_optimum(inst)

    @settings(max_examples=40, deadline=None)
    @given(random_instances)
    def test_solution_is_feasible_and_basis_reproduces_it(self, inst):
        model = build_mmcc_lp(inst)
        sol = solve_lp(model)
        assert check_lp_feasibility(sol, model) == []
        again = resolve_basis(model, sol.basis)
        assert again.y == sol.y and again.x == sol.x

    @settings(max_examples=25, deadline=None)
    @given(random_instances)
    def test_relaxation_below_integral_optimum(self, inst):
        assert solve_lp(build_mmcc_lp(inst)).cost <= optimal_cover(inst).opt_size


class TestFeasibilityCheck:
    def test_optimum_has_no_violations(self, line3):
        model = build_mmcc_lp(line3)
        assert check_lp_feasibility(solve_lp(model), model) == []

    def test_halved_solution_breaks_flow_rows(self, line3):
        model = build_mmcc_lp(line3)
        sol = solve_lp(model)
        half = FractionalSolution({k: v / 2 for k, v in sol.y.items()}, {k: v / 2 for k, v in sol.x.items()})
        bad = check_lp_feasibility(half, model)
        flows = [v for v in bad if v.name[0] == "flow"]
        assert len(flows) == 3 and all(v.excess == F(1, 2) for v in flows)

    def test_x_above_y(self, line3):
        model = build_mmcc_lp(line3)
        sol = solve_lp(model)
        sol.y[0] = F(1, 4)
        bad = check_lp_feasibility(sol, model)
        assert any(v.name[0] == "open" and v.name[1] == 0 for v in bad)

    def test_flow_outside_ball_reported(self, line3):
        model = build_mmcc_lp(line3)
        sol = solve_lp(model)
        sol.x[(0, 2)] = F(1, 10)
        bad = check_lp_feasibility(sol, model)
        assert any(v.name == ("coverage", 0, 2) for v in bad)

    def test_cost_is_sum_of_y(self):
        sol = FractionalSolution({0: F(1, 3), 1: F(1, 6)}, {})
        assert sol.cost == F(1, 2)
