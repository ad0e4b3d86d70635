from __future__ import annotations

from fractions import Fraction

from ..field import QSqrt5
from ..solution import RoundedSolution
from .prepare import require


def combine(part1: RoundedSolution, o_prime, x_prime, instance, cfg) -> RoundedSolution:
    """Union of both roundings; a ball opened in both keeps one copy with merged flow.

    Balls opened while rounding the second auxiliary solution serve within
    three times their radius.
    """
    require(cfg.merge_factor < 1, "merge factor (1 + 1/(7a))/10 must be below 1")
    out = RoundedSolution()
    for b, f in part1.open.items():
        for role in part1.provenance.get(b, ()):
            out.add(b, f, role)
    for (b, p), v in part1.x.items():
        out.assign(b, p, v)
    for c in o_prime:
        out.add(c.ball, QSqrt5(3), "O'")
    for (c, p), v in x_prime.items():
        out.assign(c.ball, p, v)
    for b in out.open:
        cap = instance.balls[b].capacity
        require(out.load(b) <= cap, f"merged flow {out.load(b)} of ball {b} exceeds U={cap}")
        if len(out.provenance[b]) > 1:
            require(out.load(b) <= cfg.merge_factor * cap, f"ball {b} exceeds merge bound")
    for p in instance.clients:
        require(out.inflow(p) == 1, f"point {p} receives {out.inflow(p)} != 1")
    return out
