"""From an optimal fractional solution to the two auxiliary fractional solutions.

Everything here is pure bookkeeping on exact rationals; the analysis-facing
postconditions (auxiliary feasibility, cost bounds) are checked by the caller.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import InvariantViolation
from ..lp import FractionalSolution
from .config import Copy, PipelineConfig

ZERO = Fraction(0)


def threshold(sigma_star: FractionalSolution, alpha):
    """Round every ``y > alpha`` up to 1; returns ``(sigma, heavy, light)``."""
    alpha = Fraction(alpha)
    sigma = FractionalSolution(
        {i: (Fraction(1) if v > alpha else v) for i, v in sigma_star.y.items()},
        dict(sigma_star.x),
    )
    heavy = {i for i, v in sigma.y.items() if v == 1}
    light = {i for i, v in sigma.y.items() if 0 < v <= alpha}
    return sigma, heavy, light


def light_flow(sigma: FractionalSolution, light, point) -> Fraction:
    return sum((v for (i, p), v in sigma.x.items() if p == point and i in light), ZERO)


def partition_points(sigma: FractionalSolution, light, alpha, points):
    """Split ``points`` into P1 (light inflow at most 4 alpha) and P2 (the rest)."""
    bound = 4 * Fraction(alpha)
    p1, p2 = set(), set()
    for p in points:
        (p1 if light_flow(sigma, light, p) <= bound else p2).add(p)
    return p1, p2


def scale_capacities(instance, heavy, light, cfg: PipelineConfig) -> dict:
    """U' per ball: unchanged for heavy balls, divided by the divisor for light ones."""
    caps = {}
    for b in instance.balls:
        if b.id in light:
            caps[b.id] = Fraction(b.capacity, cfg.light_capacity_divisor)
        elif b.id in heavy:
            caps[b.id] = Fraction(b.capacity)
    return caps


def build_aux1(sigma, heavy, light, p1, cfg: PipelineConfig) -> FractionalSolution:
    """Heavy copies keep y = 1, light copies get divisor * y; x restricted to P1."""
    k = cfg.light_capacity_divisor
    y = {Copy(i, "H1"): sigma.y[i] for i in sorted(heavy)}
    y.update({Copy(i, "L1"): k * sigma.y[i] for i in sorted(light)})
    x = {}
    for (i, p), v in sigma.x.items():
        if p in p1 and v:
            if i in heavy:
                x[(Copy(i, "H1"), p)] = v
            elif i in light:
                x[(Copy(i, "L1"), p)] = v
    return FractionalSolution(y, x)


def build_aux2(sigma, light, p2, cfg: PipelineConfig):
    """Light copies (L2) scaled like L1, x restricted to P2; returns ``(sigma_hat, demands)``."""
    k = cfg.light_capacity_divisor
    y = {Copy(i, "L2"): k * sigma.y[i] for i in sorted(light)}
    x = {}
    demands = {p: ZERO for p in sorted(p2)}
    for (i, p), v in sigma.x.items():
        if p in p2 and i in light and v:
            x[(Copy(i, "L2"), p)] = v
            demands[p] += v
    return FractionalSolution(y, x), demands


def double_and_cap(sigma_hat: FractionalSolution) -> FractionalSolution:
    """Double every value, then trim points whose inflow exceeds 1 back to exactly 1.

    Trimming removes flow from the lowest copy first.
    """
    out = FractionalSolution(
        {c: 2 * v for c, v in sigma_hat.y.items()},
        {k: 2 * v for k, v in sigma_hat.x.items()},
    )
    by_point = {}
    for (c, p) in out.x:
        by_point.setdefault(p, []).append(c)
    for p, copies in sorted(by_point.items()):
        excess = sum(out.x[(c, p)] for c in copies) - 1
        for c in sorted(copies):
            if excess <= 0:
                break
            take = min(excess, out.x[(c, p)])
            out.x[(c, p)] -= take
            excess -= take
    out.prune()
    return out


def reroute(solution: FractionalSolution, point, sources, target, amount, available=None) -> dict:
    """Move ``amount`` of ``point``'s flow from ``sources`` to ``target``.

    ``sources`` is a single copy or an iterable of copies; several sources are
    drained in ascending order. Returns the amount taken from each source.
    ``available`` is the target's remaining capacity when it is tracked.
    """
    amount = Fraction(amount)
    if amount < 0:
        raise ValueError("negative reroute amount")
    if isinstance(sources, (list, tuple, set, frozenset)) and not isinstance(sources, Copy):
        srcs = sorted(s for s in sources if s != target)
    else:
        srcs = [sources]
    have = sum((solution.x.get((s, point), ZERO) for s in srcs), ZERO)
    if have < amount:
        raise ValueError(f"sources hold {have} of point {point}'s flow, need {amount}")
    if available is not None and amount > available:
        raise ValueError(f"target capacity {available} below reroute amount {amount}")
    taken = {}
    left = amount
    for s in srcs:
        if left == 0:
            break
        cur = solution.x.get((s, point), ZERO)
        t = min(cur, left)
        if t:
            if cur == t:
                del solution.x[(s, point)]
            else:
                solution.x[(s, point)] = cur - t
            taken[s] = t
            left -= t
    if amount:
        solution.x[(target, point)] = solution.x.get((target, point), ZERO) + amount
    return taken


def reroute_ball(solution: FractionalSolution, source, target) -> dict:
    """Move all of ``source``'s flow to ``target``; returns the per-point amounts moved."""
    moved = {}
    for (c, p) in sorted(k for k in solution.x if k[0] == source):
        v = solution.x.pop((c, p))
        if v:
            solution.x[(target, p)] = solution.x.get((target, p), ZERO) + v
            moved[p] = v
    return moved


def require(cond, message):
    if not cond:
        raise InvariantViolation(message)
