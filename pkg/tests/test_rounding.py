from collections import Counter
from fractions import Fraction
from pathlib import Path

import pytest

from capcover.errors import InvariantViolation
from capcover.field import GOLDEN, TWO_PLUS_SQRT5, QSqrt5
from capcover.instance import make_instance
from capcover.lp import FractionalSolution
from capcover.rounding import (
    Copy,
    PipelineConfig,
    build_aux1,
    build_aux2,
    combine,
    double_and_cap,
    format_trace,
    parse_trace,
    partition_points,
    reroute,
    reroute_ball,
    round_aux2,
    run_pipeline,
    scale_capacities,
    threshold,
)
from capcover.scenarios import light_rich, saturated, shared_opening, single_cluster, tight_uniform
from capcover.solution import RoundedSolution
from capcover.verify import check_solution, check_trace
from make_golden import GOLDEN as GOLDEN_DIR, cases

F = Fraction
A = F(1, 60)
CFG = PipelineConfig()


def run_case(inst, sigma):
    return run_pipeline(inst, sigma_star=sigma)


def L1(b):
    return Copy(b, "L1")


def L2(b):
    return Copy(b, "L2")


class TestConfig:
    def test_defaults(self):
        assert CFG.alpha == A and CFG.aux2_group_upper == F(21, 60) and CFG.aux2_scale == F(60, 7)
        assert CFG.merge_factor == F(67, 70) < 1
        assert CFG.cost_bound_factor == 6000

    @pytest.mark.parametrize("alpha", [F(1, 50), F(0), F(-1, 60)])
    def test_alpha_range(self, alpha):
        with pytest.raises(ValueError):
            PipelineConfig(alpha=alpha)

    def test_top_k_tied_to_divisor(self):
        with pytest.raises(ValueError):
            PipelineConfig(top_k=9)

    def test_small_alpha_cannot_merge(self):
        cfg = PipelineConfig(alpha=F(1, 70))
        assert cfg.merge_factor > 1
        with pytest.raises(InvariantViolation):
            run_pipeline(make_instance([[0]], [(0, 1, 1)], "uniform"), cfg)


class TestPrepare:
    @pytest.mark.parametrize(
        "y, heavy, light, out",
        [(F(1), {0}, set(), F(1)), (F(1, 100), set(), {0}, F(1, 100)), (F(1, 50), {0}, set(), F(1))],
    )
    def test_threshold(self, y, heavy, light, out):
        sigma, h, l = threshold(FractionalSolution({0: y}, {(0, 0): y}), A)
        assert (h, l, sigma.y[0]) == (heavy, light, out)

    def test_threshold_leaves_input_alone(self):
        star = FractionalSolution({0: F(1, 2)}, {})
        threshold(star, A)
        assert star.y[0] == F(1, 2)

    def test_partition_boundary(self):
        x = {(0, 0): 1, (1, 1): 4 * A, (0, 1): 1 - 4 * A, (1, 2): 4 * A + F(1, 1000), (0, 2): F(1, 2)}
        sigma = FractionalSolution({0: F(1), 1: A}, x)
        p1, p2 = partition_points(sigma, {1}, A, [0, 1, 2])
        assert p1 == {0, 1} and p2 == {2}

    def test_scale_capacities(self):
        inst = make_instance([[0]], [(0, 1, 7), (0, 2, 10), (0, F(1, 2), 3)], "monotonic")
        assert scale_capacities(inst, {0}, {1}, CFG) == {0: 7, 1: 1}

    def test_aux1(self):
        sigma = FractionalSolution({0: F(1), 1: A}, {(0, 0): 1 - A, (1, 0): A, (0, 1): F(1)})
        bar = build_aux1(sigma, {0}, {1}, {0}, CFG)
        assert bar.y == {Copy(0, "H1"): 1, L1(1): 10 * A}
        assert bar.x == {(Copy(0, "H1"), 0): 1 - A, (L1(1), 0): A}
        # light load alpha fits y-bar times U' = 10 alpha * 10/10
        assert bar.flow_out(L1(1)) <= bar.y[L1(1)] * F(10, 10)

    def test_aux2(self):
        sigma = FractionalSolution({0: F(1), 1: A, 2: A}, {(0, 0): 1 - 5 * A, (1, 0): 2 * A, (2, 0): 3 * A})
        hat, demands = build_aux2(sigma, {1, 2}, {0}, CFG)
        assert demands == {0: 5 * A}
        assert all(v <= 10 * A for v in hat.y.values())
        assert build_aux2(sigma, {1, 2}, set(), CFG)[0].cost == 10 * A * 2

    def test_aux2_empty(self):
        hat, demands = build_aux2(FractionalSolution({}, {}), set(), set(), CFG)
        assert hat.cost == 0 and demands == {}

    def test_double_and_cap(self):
        hat = FractionalSolution(
            {L2(0): 10 * A, L2(1): 10 * A, L2(2): 10 * A},
            {(L2(0), 0): F(1, 5), (L2(1), 0): F(2, 5), (L2(2), 1): 8 * A},
        )
        out = double_and_cap(hat)
        assert out.y[L2(0)] == 20 * A
        assert out.x == {(L2(0), 0): F(1, 5), (L2(1), 0): F(4, 5), (L2(2), 1): 16 * A}

    def test_double_and_cap_drops_emptied_flow(self):
        hat = FractionalSolution({L2(0): F(1), L2(1): F(1)}, {(L2(0), 0): F(1, 4), (L2(1), 0): F(3, 4)})
        assert double_and_cap(hat).x == {(L2(1), 0): F(1)}


class TestReroute:
    def sol(self):
        return FractionalSolution({}, {(L1(0), 0): F(1, 3), (L1(1), 0): F(1, 3), (L1(2), 0): F(1, 3)})

    def test_zero(self):
        s = self.sol()
        assert reroute(s, 0, L1(0), L1(2), 0) == {}
        assert s.x == self.sol().x

    def test_full(self):
        s = self.sol()
        reroute(s, 0, L1(0), L1(2), F(1, 3))
        assert (L1(0), 0) not in s.x and s.x[(L1(2), 0)] == F(2, 3)

    def test_set_form_drains_ascending(self):
        s = self.sol()
        taken = reroute(s, 0, [L1(1), L1(0)], L1(2), F(1, 2))
        assert taken == {L1(0): F(1, 3), L1(1): F(1, 6)}
        assert s.x[(L1(2), 0)] == F(5, 6) and s.inflow(0) == 1

    def test_target_excluded_from_sources(self):
        s = self.sol()
        taken = reroute(s, 0, [L1(0), L1(2)], L1(2), F(1, 3))
        assert taken == {L1(0): F(1, 3)}

    @pytest.mark.parametrize("amount, available", [(F(1), None), (F(1, 3), F(1, 4)), (F(-1), None)])
    def test_rejects(self, amount, available):
        with pytest.raises(ValueError):
            reroute(self.sol(), 0, L1(0), L1(2), amount, available)

    def test_ball_form(self):
        s = FractionalSolution({}, {(L1(0), 0): F(1, 3), (L1(0), 1): F(1, 2), (L1(1), 1): F(1, 2)})
        assert reroute_ball(s, L1(0), L1(1)) == {0: F(1, 3), 1: F(1, 2)}
        assert s.x == {(L1(1), 0): F(1, 3), (L1(1), 1): F(1)}


class TestClusters:
    def test_no_light_balls(self, single):
        res = run_pipeline(single)
        assert res.state.opened == [] and not res.light
        assert [e.kind for e in res.trace] == ["init", "select", "summary"]
        assert res.rounded.open == {0: QSqrt5(3)}

    def test_single_absorption(self):
        inst = make_instance([[0, 0, 0]] * 3, [(0, 1, 10), (0, 1, 10)], "monotonic")
        t = F(1, 100)
        sigma = FractionalSolution({0: F(1), 1: t}, {(1, 0): t, (0, 0): 1 - t, (0, 1): F(1), (0, 2): F(1)})
        res = run_pipeline(inst, sigma_star=sigma)
        assert [e.kind for e in res.trace] == ["init", "absorb", "select", "summary"]
        assert res.trace[1].fields == {"heavy": 0, "light": 1, "flow": t}
        assert res.state.opened == []

    def test_cluster_flow_within_heavy_capacity(self):
        for seed in range(4):
            res = run_case(*saturated(seed, "monotonic"))
            for h in res.state.heavy:
                assert res.state.load(h) <= res.instance.balls[h.ball].capacity

    def test_opening_cases_are_exercised(self):
        seen = Counter()
        for seed in range(6):
            for variant in ("monotonic", "uniform"):
                res = run_case(*saturated(seed, variant))
                seen.update(e["case"] for e in res.trace if e.kind == "open")
        assert {"1", "2a", "2b", "3"} <= set(seen)


class TestSelection:
    def select_events(self, res):
        return [e for e in res.trace if e.kind == "select"]

    def test_heavy_ranked_in_top(self):
        res = run_case(*single_cluster(3, "monotonic", r_light=F(2)))
        (ev,) = self.select_events(res)
        assert ev["case"] == "1" and ev["balls"][-1] == 3
        assert res.rounded.open[3] == 3 and all(res.rounded.open[b] == 1 for b in ev["balls"][:-1])

    def test_heavy_alone_in_cluster(self, line3):
        res = run_pipeline(line3)
        assert set(res.rounded.open.values()) == {QSqrt5(3)}

    def test_twelve_larger_lights_monotonic(self):
        inst, sigma = single_cluster(12, "monotonic")
        res = run_pipeline(inst, sigma_star=sigma)
        (ev,) = self.select_events(res)
        assert ev["case"] == "2" and ev["balls"] == list(range(10))
        assert all(f == 5 for f in ev["factors"])
        assert 12 not in res.rounded.open
        for b in ev["balls"]:
            assert res.rounded.load(b) <= res.caps[b]
        assert check_solution(inst, res.rounded, 5).ok

    def test_twelve_larger_lights_uniform(self):
        inst, sigma = single_cluster(12, "uniform")
        res = run_pipeline(inst, sigma_star=sigma)
        (ev,) = self.select_events(res)
        assert ev["case"] == "2ii"
        assert all(f == 3 + 2 / GOLDEN for f in ev["factors"])
        assert check_solution(inst, res.rounded, TWO_PLUS_SQRT5).ok

    def test_equal_radii_uniform_keeps_heavy(self):
        inst, sigma = single_cluster(12, "uniform", r_heavy=F(2), r_light=F(2))
        res = run_pipeline(inst, sigma_star=sigma)
        (ev,) = self.select_events(res)
        assert ev["case"] == "2i" and ev["balls"][-1] == 12 and len(ev["balls"]) == 10
        assert res.rounded.open[12] == TWO_PLUS_SQRT5

    def test_case_constants(self):
        c = GOLDEN
        assert 3 + 2 / c == 1 + 2 * c == TWO_PLUS_SQRT5 < QSqrt5(F(424, 100))
        assert QSqrt5(3) <= TWO_PLUS_SQRT5  # r_h + 2 r_l with r_h = r_l
        r_l = F(1)
        r_h = r_l / (2 * c)
        assert r_l + 2 * r_h + 2 * r_l <= (3 + 2 / c) * r_l  # smallest selected light has r_t >= r_l


class TestAux2:
    def test_empty(self):
        inst = make_instance([[0]], [(0, 1, 1)], "uniform")
        assert round_aux2(FractionalSolution({}, {}), inst, CFG, set(), {}) [:2] == ([], {})

    def test_first_ball_alone_forms_group(self):
        inst = make_instance([[0]], [(0, 1, 10), (0, 1, 10), (0, 1, 10)], "uniform")
        y = {L2(b): 10 * A for b in range(3)}
        x = {(L2(b), 0): 10 * A for b in range(3)}
        trace = []
        o_prime, x_prime, _ = round_aux2(FractionalSolution(y, x), inst, CFG, {0}, {b: F(1) for b in range(3)}, trace)
        assert trace[0]["group"] == [0]
        assert o_prime == [L2(0), L2(1), L2(2)]
        assert sum(x_prime.values()) == 1

    def test_load_within_scaled_capacity(self):
        for seed in range(5):
            res = run_case(*light_rich(seed, "monotonic"))
            for c in res.o_prime:
                load = sum((v for (d, _), v in res.x_prime.items() if d == c), F(0))
                assert load <= CFG.aux2_scale * res.caps[c.ball]


class TestCombine:
    def build(self, n_first, n_second):
        n = n_first + n_second
        inst = make_instance([[0] * n] * n, [(0, 1, 70)], "monotonic")
        part1 = RoundedSolution()
        part1.add(0, 1, "O")
        for p in range(n_first):
            part1.assign(0, p, 1)
        x_prime = {(L2(0), p): F(1) for p in range(n_first, n)}
        return part1, [L2(0)], x_prime, inst

    def test_merged_flow_at_bound(self):
        out = combine(*self.build(30, 37), CFG)
        assert out.load(0) == 67 == CFG.merge_factor * 70
        assert out.provenance[0] == {"O", "O'"} and out.open[0] == 3

    def test_merged_flow_above_bound(self):
        with pytest.raises(InvariantViolation):
            combine(*self.build(30, 38), CFG)

    @pytest.mark.parametrize("variant", ["monotonic", "uniform"])
    def test_ball_open_in_both_roundings(self, variant):
        inst, sigma, ball = shared_opening(0, variant)
        res = run_pipeline(inst, sigma_star=sigma)
        assert res.rounded.provenance[ball] == {"O", "O'"}
        assert res.rounded.load(ball) <= CFG.merge_factor * inst.balls[ball].capacity

    def test_disjoint_union(self):
        inst = make_instance([[0, 0], [0, 0]], [(0, 1, 1), (1, 1, 1)], "monotonic")
        part1 = RoundedSolution()
        part1.add(0, 1, "O")
        part1.assign(0, 0, 1)
        out = combine(part1, [L2(1)], {(L2(1), 1): F(1)}, inst, CFG)
        assert out.open == {0: 1, 1: 3} and out.x == {(0, 0): 1, (1, 1): 1}


class TestPipeline:
    def test_single_point(self, single):
        res = run_pipeline(single)
        assert res.rounded.cost == 1 and res.rounded.inflow(0) == 1

    def test_deterministic(self):
        a = run_case(*saturated(3, "uniform"))
        b = run_case(*saturated(3, "uniform"))
        assert format_trace(a.trace) == format_trace(b.trace)
        assert a.rounded == b.rounded

    def test_trace_round_trip(self):
        res = run_case(*light_rich(1, "monotonic"))
        text = format_trace(res.trace)
        assert format_trace(parse_trace(text)) == text
        assert check_trace(parse_trace(text), CFG, res.lp_cost).ok

    @pytest.mark.parametrize("name, case", list(cases()))
    def test_golden_trace(self, name, case):
        inst, sigma = case
        expected = (GOLDEN_DIR / f"{name}.trace").read_text()
        assert format_trace(run_pipeline(inst, sigma_star=sigma).trace) == expected

    @pytest.mark.parametrize("seed", range(4))
    @pytest.mark.parametrize("variant", ["monotonic", "uniform"])
    @pytest.mark.parametrize("wide", [False, True])
    def test_light_rich_runs_verify(self, seed, variant, wide):
        inst, sigma = light_rich(seed, variant, wide_lights=wide)
        res = run_pipeline(inst, sigma_star=sigma)
        beta = 5 if variant == "monotonic" else TWO_PLUS_SQRT5
        assert check_solution(inst, res.rounded, beta).ok
        assert check_trace(res.trace, CFG, sigma.cost).ok

    def test_tight_uniform_needs_full_factor(self):
        inst, sigma, far = tight_uniform()
        res = run_pipeline(inst, sigma_star=sigma)
        assert any(e.kind == "select" and e["case"] == "2ii" for e in res.trace)
        assert check_solution(inst, res.rounded, TWO_PLUS_SQRT5).ok
