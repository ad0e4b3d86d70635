from __future__ import annotations

from fractions import Fraction

from ..lp import FractionalSolution
from .config import PipelineConfig
from .prepare import reroute_ball, require
from .trace import Event

ZERO = Fraction(0)


def round_aux2(sigma_hat2: FractionalSolution, instance, cfg: PipelineConfig, points, caps, trace=None):
    """Round the doubled second auxiliary solution; returns ``(o_prime, x_prime, final sigma-hat)``.

    While some point still draws more than alpha from unopened light copies, a
    prefix ``T`` of its serving copies (ascending) with y-mass in
    ``[alpha, 21 alpha]`` is collapsed onto its largest ball, which opens.
    Every point then draws at least ``7 alpha`` from opened copies, so scaling
    by ``1/(7 alpha)`` and trimming gives each point exactly one unit.
    ``caps`` maps ball id to scaled capacity.
    """
    alpha = cfg.alpha
    sol = sigma_hat2.copy()
    points = sorted(points)
    remaining = sorted(c for c, v in sol.y.items() if v > 0)
    o_prime = []

    def s_flow(p, among):
        return sum((sol.x.get((c, p), ZERO) for c in among), ZERO)

    while True:
        p = next((q for q in points if s_flow(q, remaining) > alpha), None)
        if p is None:
            break
        group, mass = [], ZERO
        for c in remaining:
            if sol.x.get((c, p), ZERO) > 0:
                group.append(c)
                mass += sol.y[c]
                if mass >= alpha:
                    break
        require(alpha <= mass <= cfg.aux2_group_upper,
                f"no light group of y-mass in [a, 21a] for point {p}")
        t = min(group, key=lambda c: instance.balls[c.ball].size_key())
        for c in group:
            sol.y[c] = ZERO
            if c != t:
                reroute_ball(sol, c, t)
        sol.y[t] = Fraction(1)
        o_prime.append(t)
        remaining = [c for c in remaining if c not in group]
        require(sol.flow_out(t) <= caps[t.ball], f"opened copy {t} over scaled capacity")
        if trace is not None:
            trace.append(Event("oprime", {"ball": t.ball, "group": [c.ball for c in group]}))

    x_prime = {}
    for p in points:
        opened = s_flow(p, o_prime)
        require(opened * cfg.aux2_scale >= 1, f"point {p} draws only {opened} from opened copies")
        row = {}
        for c in sorted(o_prime):
            v = sol.x.get((c, p), ZERO)
            if v:
                row[c] = min(cfg.aux2_scale * v, Fraction(1))
        excess = sum(row.values(), ZERO) - 1
        for c in sorted(row):
            if excess <= 0:
                break
            t = min(excess, row[c])
            row[c] -= t
            excess -= t
        for c, v in row.items():
            if v:
                x_prime[(c, p)] = v
    return o_prime, x_prime, sol
