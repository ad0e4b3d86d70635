from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from capcover.errors import InfeasibleError, InstanceError
from capcover.field import QSqrt5, TWO_PLUS_SQRT5
from capcover.instance import (
    MetricSpace,
    Variant,
    contains,
    format_instance,
    from_set_cover,
    generate_random,
    make_instance,
    parse_instance,
    validate_instance,
    validate_metric,
)
from capcover.lp import build_mmcc_lp, solve_lp
from capcover.oracle import optimal_cover

from helpers import line_dist


class TestValidateMetric:
    def test_line_metric_ok(self):
        assert validate_metric(MetricSpace.from_rows(line_dist(3))) is None

    def test_asymmetry(self):
        bad = validate_metric(MetricSpace.from_rows([[0, 1], [2, 0]]))
        assert (bad.kind, bad.indices) == ("asymmetry", (0, 1))

    def test_triangle(self):
        bad = validate_metric(MetricSpace.from_rows([[0, 1, 5], [1, 0, 1], [5, 1, 0]]))
        assert (bad.kind, bad.indices) == ("triangle", (0, 1, 2))

    def test_negative_diagonal_shape(self):
        assert validate_metric(MetricSpace.from_rows([[0, -1], [-1, 0]])).kind == "negative"
        assert validate_metric(MetricSpace.from_rows([[1, 1], [1, 0]])).kind == "diagonal"
        assert validate_metric(MetricSpace.from_rows([[0, 1], [1]])).kind == "shape"


class TestContains:
    def test_center_always_inside(self, line3):
        for beta in (1, 5, TWO_PLUS_SQRT5):
            assert contains(line3, 0, 0, beta)

    def test_line3_expansion(self, line3):
        assert not contains(line3, 0, 2, 1)
        assert contains(line3, 0, 2, 2)

    def test_set_cover_non_member(self):
        inst = from_set_cover([{1, 2}, {2, 3}], 3)
        # element 3 is point 2; set {1,2} is ball 0
        assert inst.dist(0, 2) == 3
        assert not contains(inst, 0, 2, Fraction(29, 10))
        assert contains(inst, 0, 2, 3)

    def test_irrational_expansion_is_exact(self):
        near = Fraction(4236, 1000)  # just below 2 + sqrt5
        far = Fraction(4237, 1000)
        inst = make_instance([[0, near, far], [near, 0, far - near], [far, far - near, 0]],
                             [(0, 1, 3)], "uniform", clients=[0])
        assert contains(inst, 0, 1, TWO_PLUS_SQRT5)
        assert not contains(inst, 0, 2, TWO_PLUS_SQRT5)


class TestValidateInstance:
    def test_uniform_requires_equal_capacities(self):
        with pytest.raises(InstanceError):
            make_instance(line_dist(2), [(0, 1, 1), (1, 1, 2)], "uniform")

    def test_monotonic_requires_monotone_capacities(self):
        with pytest.raises(InstanceError):
            make_instance(line_dist(2), [(0, 2, 1), (1, 1, 2)], "monotonic")

    def test_uncovered_point_is_infeasible(self):
        with pytest.raises(InfeasibleError):
            make_instance(line_dist(3), [(0, 1, 3)], "uniform")

    @pytest.mark.parametrize("ball", [(0, 0, 1), (0, 1, 0), (0, -1, 1), (5, 1, 1)])
    def test_bad_balls(self, ball):
        with pytest.raises(InstanceError):
            make_instance(line_dist(2), [ball, (1, 1, 1)], "uniform")


class TestGenerateRandom:
    def test_single_point(self):
        inst = generate_random(1, 1, "uniform", 0)
        assert contains(inst, 0, 0) and inst.balls[0].capacity >= 1

    def test_monotone_capacities(self):
        inst = generate_random(5, 4, "monotonic", 7)
        caps = [b.capacity for b in sorted(inst.balls, key=lambda b: b.radius)]
        assert caps == sorted(caps)

    def test_uniform_is_valid_and_lp_feasible(self):
        inst = generate_random(8, 6, "uniform", 1)
        assert validate_metric(inst.space) is None
        assert solve_lp(build_mmcc_lp(inst)).cost >= 1

    def test_deterministic(self):
        a = format_instance(generate_random(6, 4, "monotonic", 3))
        assert a == format_instance(generate_random(6, 4, "monotonic", 3))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            generate_random(0, 2, "uniform", 0)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 8), st.integers(1, 6), st.sampled_from(list(Variant)), st.integers(0, 10**6))
    def test_generated_instances_are_valid(self, n, m, variant, seed):
        inst = generate_random(n, m, variant, seed)
        validate_instance(inst)
        assert all(v.denominator == 1 for row in inst.space.dist for v in row)


class TestFromSetCover:
    def test_two_sets(self):
        inst = from_set_cover([{"e1", "e2"}, {"e2", "e3"}], 3)
        assert len(inst.clients) == 3 and len(inst.balls) == 2
        assert all(b.radius == 1 and b.capacity == 3 for b in inst.balls)
        e3 = 2
        assert inst.dist(0, e3) == 3

    def test_single_set(self):
        assert optimal_cover(from_set_cover([{"e1"}], 1)).opt_size == 1

    def test_duplicate_sets(self):
        assert optimal_cover(from_set_cover([{"e1"}, {"e1"}], 1)).opt_size == 1

    def test_disconnected_components_stay_metric(self):
        inst = from_set_cover([{1}, {2}], 1)
        assert validate_metric(inst.space) is None
        assert inst.dist(0, 1) >= 3

    def test_uncovered_element(self):
        with pytest.raises(InfeasibleError):
            from_set_cover([{1}], 1, universe={1, 2})


class TestFileFormat:
    def test_round_trip(self, line3):
        text = format_instance(line3)
        assert text.startswith("capcover-instance v1\nvariant monotonic\npoints 3\ndist\n0/1 1/1 2/1\n")
        assert parse_instance(text) == line3

    def test_clients_line_round_trip(self):
        inst = from_set_cover([{1, 2}, {2, 3}], 3)
        text = format_instance(inst)
        assert "\nclients 0 1 2\n" in text
        assert parse_instance(text) == inst

    @pytest.mark.parametrize(
        "old,new",
        [
            ("capcover-instance v1", "capcover-instance v2"),
            ("variant monotonic", "variant mixed"),
            ("0/1 1/1 2/1", "0 1/1 2/1"),
            ("0/1 1/1 2/1", "0/1 2/2 2/1"),
            ("0/1 1/1 2/1", "0/1 1/1"),
            ("1 1 1/1 2", "2 1 1/1 2"),
            ("balls 2", "balls 3"),
            ("1 1 1/1 2", "1 1 1/1 2 7"),
            ("0 0 1/1 2", "0 0 1.0 2"),
        ],
    )
    def test_parser_rejects_deviations(self, line3, old, new):
        text = format_instance(line3)
        assert old in text
        with pytest.raises(InstanceError):
            parse_instance(text.replace(old, new, 1))

    def test_trailing_content_rejected(self, line3):
        with pytest.raises(InstanceError):
            parse_instance(format_instance(line3) + "extra\n")

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 7), st.integers(1, 5), st.sampled_from(list(Variant)), st.integers(0, 10**6))
    def test_round_trip_random(self, n, m, variant, seed):
        inst = generate_random(n, m, variant, seed)
        assert parse_instance(format_instance(inst)) == inst
