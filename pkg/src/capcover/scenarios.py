"""Instances paired with feasible fractional solutions that contain many light balls.

Optimal vertices of the relaxation on small random instances seldom have any
ball with ``0 < y <= alpha``, so the cluster and second-auxiliary machinery
would go untested. These builders write the fractional solution directly:
heavy balls carry most of the flow and dozens of light balls each carry a
sliver, so some points have little light inflow and others have a lot.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .errors import InfeasibleError
from .instance import Ball, Instance, MetricSpace, Variant, validate_instance
from .lp import FractionalSolution, build_mmcc_lp, check_lp_feasibility

ZERO = Fraction(0)


def _line(coords) -> MetricSpace:
    return MetricSpace.from_rows([[abs(a - b) for b in coords] for a in coords])


def light_rich(
    seed: int,
    variant,
    n_points: int = 16,
    n_light: int = 40,
    wide_lights: bool = False,
    alpha: Fraction = Fraction(1, 60),
    retries: int = 50,
):
    """Random line instance and a feasible solution of its relaxation; returns ``(instance, sigma)``.

    Heavy balls span the whole line and take whatever flow the light balls
    leave. With
    ``wide_lights`` one extra heavy ball of radius 1 sits among light balls of
    radius 1 to 3, so its cluster can outrank it and selection has to fall
    back on the light balls.
    """
    variant = Variant(variant)
    rng = random.Random(seed)
    for _ in range(retries):
        coords = list(range(n_points))
        light_r = [Fraction(rng.choice([1, 1, 2, 3] if wide_lights else [1, 2])) for _ in range(n_light)]
        light_c = [rng.randrange(n_points) for _ in range(n_light)]
        if variant is Variant.UNIFORM:
            u_all = rng.randint(3, 6)
            cap_of = lambda r: u_all  # noqa: E731
        else:
            steps = sorted(rng.randint(1, 5) for _ in range(3))
            cap_of = lambda r: steps[min(int(r), 3) - 1]  # noqa: E731

        y, x = {}, {}
        balls = []
        for r, c in zip(light_r, light_c):
            b = len(balls)
            balls.append((c, r))
            yv = alpha * Fraction(rng.choice([1, 1, 2, 3]), rng.choice([3, 4, 6]))
            y[b] = yv
            members = [p for p in coords if abs(p - c) <= r]
            rng.shuffle(members)
            for p in members[: cap_of(r)]:
                x[(b, p)] = yv
        light_in = {p: sum((v for (b, q), v in x.items() if q == p), ZERO) for p in coords}
        if any(v >= Fraction(1, 2) for v in light_in.values()):
            continue
        demand = {p: 1 - light_in[p] for p in coords}

        heavy = []
        if wide_lights:
            c = rng.randrange(n_points)
            b = len(balls)
            balls.append((c, Fraction(1)))
            heavy.append(b)
            y[b] = Fraction(1)
            for p in coords:
                if abs(p - c) <= 1:
                    take = demand[p] * Fraction(rng.randint(1, 4), 4)
                    x[(b, p)] = take
                    demand[p] -= take
        big_r = Fraction(n_points)
        total = sum(demand.values(), ZERO)
        if variant is Variant.UNIFORM:
            big_u = u_all
        else:
            big_u = max(steps[-1], rng.randint(3, 6))
        n_big = math.ceil(total / big_u)
        if wide_lights and variant is Variant.UNIFORM and y and sum(
            x.get((heavy[0], p), ZERO) for p in coords
        ) > u_all:
            continue
        if wide_lights and variant is Variant.MONOTONIC:
            small = heavy[0]
            if sum(x.get((small, p), ZERO) for p in coords) > cap_of(1):
                continue
        big = []
        for _ in range(n_big):
            b = len(balls)
            balls.append((0, big_r))
            big.append(b)
            y[b] = Fraction(1)
            heavy.append(b)
        room = {b: Fraction(big_u) for b in big}
        ok = True
        for p in coords:
            need = demand[p]
            for b in big:
                t = min(need, room[b], Fraction(1) - x.get((b, p), ZERO))
                if t > 0:
                    x[(b, p)] = x.get((b, p), ZERO) + t
                    room[b] -= t
                    need -= t
            if need:
                ok = False
                break
        if not ok:
            continue

        caps = [cap_of(r) if i not in big else big_u for i, (c, r) in enumerate(balls)]
        inst = Instance(
            _line(coords),
            tuple(Ball(i, c, r, caps[i]) for i, (c, r) in enumerate(balls)),
            variant,
        )
        try:
            validate_instance(inst)
        except ValueError:
            continue
        sigma = FractionalSolution(y, {k: v for k, v in x.items() if v})
        bad = check_lp_feasibility(sigma, build_mmcc_lp(inst))
        if bad:
            raise AssertionError(f"scenario builder produced an infeasible solution: {bad[0]}")
        return inst, sigma
    raise InfeasibleError(f"no light-rich scenario after {retries} attempts (seed={seed})")


def tight_uniform():
    """Uniform instance whose rounding sends a point almost ``(2 + sqrt5)`` radii away.

    Ten light balls of radius 1 share the centre 0; a heavy ball of radius
    ``r_h`` just below ``1/c`` (``c`` the golden ratio) touches them at 1 and
    touches an eleventh light ball on its far side, which serves the point at
    ``3 + 2 r_h``. The heavy ball ranks below all eleven, the ten shared-centre
    balls are selected and one of them inherits that far point.

    Returns ``(instance, sigma, far_point)``; the far point sits at distance
    ``3 + 2 r_h`` from centre 0, between ``2 + sqrt5 - 1/1000`` and ``2 + sqrt5``.
    """
    r_h = Fraction(6179, 10000)
    coords = [ZERO, Fraction(1), 1 + r_h, 1 + 2 * r_h, 2 + 2 * r_h, 3 + 2 * r_h]
    s0, s1, s2, s3, s4, s5 = range(6)
    u = 4
    tiny = Fraction(1, 600)
    balls = [(s0, Fraction(1))] * 10 + [(s4, Fraction(1)), (s2, r_h), (s2, Fraction(3))]
    far, heavy, big = 10, 11, 12
    y = {b: tiny for b in range(11)}
    y[heavy] = y[big] = Fraction(1)
    x = {}
    for b in range(10):
        x[(b, s0)] = x[(b, s1)] = tiny
    for p in (s3, s4, s5):
        x[(far, p)] = tiny
    light_in = {s0: 10 * tiny, s1: 10 * tiny, s2: ZERO, s3: tiny, s4: tiny, s5: tiny}
    x[(heavy, s1)] = Fraction(1, 2)
    x[(heavy, s2)] = Fraction(1)
    x[(heavy, s3)] = Fraction(1, 2)
    for p in (s0, s1, s3, s4, s5):
        rest = 1 - light_in[p] - x.get((heavy, p), ZERO)
        if rest:
            x[(big, p)] = rest
    inst = Instance(
        _line(coords),
        tuple(Ball(i, c, r, u) for i, (c, r) in enumerate(balls)),
        Variant.UNIFORM,
    )
    validate_instance(inst)
    sigma = FractionalSolution(y, x)
    bad = check_lp_feasibility(sigma, build_mmcc_lp(inst))
    if bad:
        raise AssertionError(f"tight configuration infeasible: {bad[0]}")
    return inst, sigma, s5


def saturated(seed: int, variant, n_lit: int = 14, n_light: int = 30, alpha: Fraction = Fraction(1, 60)):
    """Light balls facing heavy balls that are full but for a sliver; returns ``(instance, sigma)``.

    Every point keeps its light inflow within ``4 alpha``, and the heavy balls
    spanning the line are filled to ``U - alpha/100``, so no light ball can be
    absorbed until Cluster Formation opens one and frees heavy capacity.
    Padding points far to the left make the heavy load come out right; one of
    them is topped up by an isolated heavy ball that meets no light ball.
    Capacities range widely so every opening case occurs.
    """
    variant = Variant(variant)
    rng = random.Random(seed)
    eps = alpha / 100
    bound = 4 * alpha
    if variant is Variant.UNIFORM:
        u = rng.choice([5, 12, 20, 35])
        cap_of = lambda r: u  # noqa: E731
        big_u = u
    else:
        c1 = rng.choice([5, 12, 20])
        c2 = rng.choice([c1, 20, 35])
        cap_of = lambda r: c1 if r <= 1 else c2  # noqa: E731
        big_u = max(c2, rng.choice([20, 35, 40]))

    lit = list(range(n_lit))
    balls, y, x = [], {}, {}
    light_in = {p: ZERO for p in lit}
    for _ in range(n_light):
        c, r = rng.randrange(n_lit), Fraction(rng.choice([1, 2]))
        yv = alpha * Fraction(rng.choice([1, 2, 3]), rng.choice([4, 6, 8]))
        members = [p for p in lit if abs(p - c) <= r and light_in[p] + yv <= bound]
        rng.shuffle(members)
        members = members[: rng.randint(1, cap_of(r))]
        if not members:
            continue
        b = len(balls)
        balls.append((c, r))
        y[b] = yv
        for p in members:
            x[(b, p)] = yv
            light_in[p] += yv

    t = sum((1 - light_in[p] for p in lit), ZERO)
    k = math.ceil((t + eps) / big_u)
    needed = k * big_u - eps - t
    extra = math.floor(needed)
    frac = needed - extra
    # sites: lit 0..n_lit-1, padding at -20, -21, ..., topped-up point at -50
    pad_coords = [Fraction(-20 - i) for i in range(extra)]
    top = Fraction(-50)
    coords = [Fraction(p) for p in lit] + pad_coords + [top]
    pad = list(range(n_lit, n_lit + extra))
    top_site = len(coords) - 1
    demand = {p: 1 - light_in[p] for p in lit}
    demand.update({p: Fraction(1) for p in pad})
    demand[top_site] = frac

    big_r = Fraction(60)
    big = []
    for _ in range(k):
        b = len(balls)
        balls.append((0, big_r))
        big.append(b)
        y[b] = Fraction(1)
    room = {b: Fraction(big_u) for b in big}
    for p in lit + pad + [top_site]:
        need = demand[p]
        for b in big:
            s = min(need, room[b])
            if s > 0:
                x[(b, p)] = s
                room[b] -= s
                need -= s
        if need:
            raise AssertionError("heavy balls too small for their demand")
    iso = len(balls)
    balls.append((top_site, Fraction(1)))
    y[iso] = Fraction(1)
    if frac < 1:
        x[(iso, top_site)] = 1 - frac

    caps = [big_u if i in big else cap_of(r) for i, (c, r) in enumerate(balls)]
    inst = Instance(
        _line(coords),
        tuple(Ball(i, c, r, caps[i]) for i, (c, r) in enumerate(balls)),
        variant,
    )
    validate_instance(inst)
    sigma = FractionalSolution(y, x)
    bad = check_lp_feasibility(sigma, build_mmcc_lp(inst))
    if bad:
        raise AssertionError(f"saturated scenario infeasible: {bad[0]}")
    return inst, sigma


def single_cluster(n_lights: int, variant, r_heavy=Fraction(1), r_light=Fraction(2), u_heavy: int = 2):
    """One heavy ball at site 0 absorbing ``n_lights`` light balls centred there too.

    Two client sites, 0 and 1, each draw ``1/1200`` from every light ball and
    the rest from the heavy ball, whose spare capacity is exactly the total
    light flow. Light capacities equal the heavy one, so every light ball is
    absorbed and the cluster holds ``n_lights + 1`` balls. Returns
    ``(instance, sigma)``.
    """
    variant = Variant(variant)
    tiny = Fraction(1, 1200)
    light_in = n_lights * tiny
    if light_in > Fraction(1, 15):
        raise ValueError("too many light balls for the points to stay light-poor")
    coords = [ZERO, Fraction(1)]
    balls = [Ball(i, 0, Fraction(r_light), u_heavy) for i in range(n_lights)]
    h = n_lights
    balls.append(Ball(h, 0, Fraction(r_heavy), u_heavy))
    y = {b: tiny for b in range(n_lights)}
    y[h] = Fraction(1)
    x = {}
    for p in (0, 1):
        for b in range(n_lights):
            x[(b, p)] = tiny
        x[(h, p)] = 1 - light_in
    inst = Instance(_line(coords), tuple(balls), variant)
    validate_instance(inst)
    return inst, FractionalSolution(y, x)




def shared_opening(seed: int, variant, alpha: Fraction = Fraction(1, 60)):
    """A saturated instance plus one light-heavy point, so a light ball opens in both roundings.

    The new point sits half a unit from the centre of a light ball that
    Cluster Formation opens and that has room for one more unit. Filler light
    balls with no other flow supply the rest of the point's demand: those
    holding the first half take the lowest ball ids, so trimming the doubled
    second-auxiliary flow removes exactly them, and the shared ball is then
    the point's first server. Fillers carry no other flow and are absorbed
    before anything else; the original balls keep their relative order, so
    the first-auxiliary side runs as in the saturated instance. Returns
    ``(instance, sigma, ball)`` with ``ball`` the shared light ball's new id.
    """
    from .rounding import run_pipeline

    base, sigma = saturated(seed, variant, alpha=alpha)
    res = run_pipeline(base, sigma_star=sigma)
    loads = {b: sum((v for (i, _), v in sigma.x.items() if i == b), ZERO) for b in res.light}
    cands = [
        c.ball for c in res.state.opened
        if loads[c.ball] + sigma.y[c.ball] <= base.balls[c.ball].capacity * sigma.y[c.ball]
    ]
    if not cands:
        raise InfeasibleError(f"seed {seed}: no opened light ball fits the shared point")
    old = cands[0]
    y_t = sigma.y[old]

    n = base.n_points
    d = base.space.dist
    top = n - 1  # the isolated site at -50; lit sites lie right of 0, padding left
    coords = [d[0][p] if d[top][p] >= 50 else -d[0][p] for p in range(n)]
    site = n
    coords.append(coords[base.balls[old].center] + Fraction(1, 2))

    half = Fraction(1, 2)
    n_low = math.ceil(half / alpha)
    n_high = math.ceil((half - y_t) / alpha)
    cap_fill = min(b.capacity for b in base.balls)
    shift = n_low
    balls = [Ball(i, site, half, cap_fill) for i in range(n_low)]
    balls += [Ball(b.id + shift, b.center, b.radius, b.capacity) for b in base.balls]
    first_high = len(balls)
    balls += [Ball(first_high + i, site, half, cap_fill) for i in range(n_high)]
    y = {b + shift: v for b, v in sigma.y.items()}
    x = {(b + shift, p): v for (b, p), v in sigma.x.items()}
    target = old + shift
    x[(target, site)] = y_t
    for b, v in [(i, half / n_low) for i in range(n_low)] + [
        (first_high + i, (half - y_t) / n_high) for i in range(n_high)
    ]:
        y[b] = v
        x[(b, site)] = v
    inst = Instance(_line(coords), tuple(balls), base.variant)
    validate_instance(inst)
    out = FractionalSolution(y, x)
    bad = check_lp_feasibility(out, build_mmcc_lp(inst))
    if bad:
        raise AssertionError(f"shared-opening scenario infeasible: {bad[0]}")
    return inst, out, target
