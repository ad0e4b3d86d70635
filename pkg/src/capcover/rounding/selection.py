"""Selection of Balls: turn each cluster into a few fully open, expanded balls.

Members of a heavy copy's cluster are ranked largest first (radius, then
capacity, then lower id). When the heavy ball ranks among the top ``top_k``
it keeps the cluster's flow, expanded by 3, and only the larger light balls
are opened alongside it. Otherwise the largest light balls take over:

* monotonic capacities: the top ``top_k`` light balls, each expanded by 5;
* uniform capacities: with ``c`` the golden ratio and ``r_l`` the radius of
  the ``top_k``-th member, either the heavy ball (if ``c * r_h >= r_l``) or
  the top ``top_k`` light balls are expanded by ``2 + sqrt5``.

A selected light ball always gets back the flow it handed to the heavy copy.
"""

from __future__ import annotations

from fractions import Fraction

from ..field import QSqrt5
from ..instance import Variant
from ..solution import RoundedSolution
from .config import Copy
from .prepare import require
from .trace import Event

ZERO = Fraction(0)


def _ranked(instance, h, members):
    return sorted(members, key=lambda c: instance.balls[c.ball].size_key())


def _layers(state, h):
    """Per-light carried flow and the heavy copy's current flow, per point."""
    per_light = {}
    total = {}
    for p in state.points:
        v = state.solution.x.get((h, p), ZERO)
        if v:
            total[p] = v
        for light, amt in state.carried.get((h, p), {}).items():
            if amt:
                per_light.setdefault(light, {})[p] = amt
    return per_light, total


def _spread(out, residual, selected, caps, used):
    """Assign residual flow point by point to selected balls in ascending id order."""
    order = sorted(selected, key=lambda c: c.ball)
    for p in sorted(residual):
        left = residual[p]
        for c in order:
            if left == 0:
                break
            room = caps[c] - used[c]
            t = min(room, left)
            if t > 0:
                out.assign(c.ball, p, t)
                used[c] += t
                left -= t
        require(left == 0, f"selected balls lack capacity for {left} of point {p}")


def _select_cluster(state, h, out, variant):
    inst, cfg = state.instance, state.cfg
    top = cfg.top_k
    members = _ranked(inst, h, [h] + state.clusters[h])
    rank = members.index(h)
    per_light, total = _layers(state, h)

    def give_back(chosen):
        residual = dict(total)
        for c in chosen:
            for p, amt in per_light.get(c, {}).items():
                out.assign(c.ball, p, amt)
                residual[p] -= amt
        return {p: v for p, v in residual.items() if v}

    if rank < top:
        chosen = members[:rank]
        for c in chosen:
            out.add(c.ball, 1, "H1")
        residual = give_back(chosen)
        out.add(h.ball, 3, "H1")
        for p, v in residual.items():
            out.assign(h.ball, p, v)
        factors = [QSqrt5(1)] * len(chosen) + [QSqrt5(3)]
        balls = [c.ball for c in chosen] + [h.ball]
        case = "1"
    else:
        c_gold = cfg.golden_c
        r_h = inst.balls[h.ball].radius
        r_l = inst.balls[members[top - 1].ball].radius
        if variant is Variant.UNIFORM and c_gold * r_h >= r_l:
            chosen = members[: top - 1]
            factor = 1 + 2 * c_gold
            for c in chosen:
                out.add(c.ball, 1, "H1")
            residual = give_back(chosen)
            out.add(h.ball, factor, "H1")
            for p, v in residual.items():
                out.assign(h.ball, p, v)
            factors = [QSqrt5(1)] * len(chosen) + [factor]
            balls = [c.ball for c in chosen] + [h.ball]
            case = "2i"
        else:
            chosen = members[:top]
            if variant is Variant.UNIFORM:
                factor = 3 + 2 / c_gold
                case = "2ii"
            else:
                factor = QSqrt5(5)
                case = "2"
            for c in chosen:
                out.add(c.ball, factor, "H1")
            residual = give_back(chosen)
            used = {c: sum(per_light.get(c, {}).values(), ZERO) for c in chosen}
            _spread(out, residual, chosen, state.caps, used)
            factors = [factor] * len(chosen)
            balls = [c.ball for c in chosen]
    state.trace.append(
        Event("select", {"cluster": h.ball, "case": case, "balls": balls, "factors": factors})
    )


def _select(state, variant) -> RoundedSolution:
    out = RoundedSolution()
    for h in state.heavy:
        _select_cluster(state, h, out, variant)
    for t in state.opened:
        out.add(t.ball, 1, "O")
        for p in state.points:
            out.assign(t.ball, p, state.solution.x.get((t, p), ZERO))
    return out


def select_balls_monotonic(state) -> RoundedSolution:
    return _select(state, Variant.MONOTONIC)


def select_balls_uniform(state) -> RoundedSolution:
    return _select(state, Variant.UNIFORM)
