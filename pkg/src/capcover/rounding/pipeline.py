from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..instance import Instance, Variant
from ..lp import (
    FractionalSolution,
    build_aux1_lp,
    build_aux2_lp,
    build_mmcc_lp,
    check_lp_feasibility,
    solve_lp,
)
from ..solution import RoundedSolution
from .aux2 import round_aux2
from .clusters import ClusterState, cluster_formation
from .combine import combine
from .config import PipelineConfig
from .prepare import (
    build_aux1,
    build_aux2,
    double_and_cap,
    partition_points,
    require,
    scale_capacities,
    threshold,
)
from .selection import select_balls_monotonic, select_balls_uniform
from .trace import Event

ZERO = Fraction(0)


@dataclass
class PipelineResult:
    instance: Instance
    cfg: PipelineConfig
    sigma_star: FractionalSolution
    sigma: FractionalSolution
    heavy: set
    light: set
    p1: set
    p2: set
    caps: dict
    sigma_bar: FractionalSolution
    sigma_hat: FractionalSolution
    demands: dict
    sigma_hat2: FractionalSolution
    state: ClusterState
    part1: RoundedSolution
    o_prime: list
    x_prime: dict
    rounded: RoundedSolution
    trace: list
    violations: dict = field(default_factory=dict)

    @property
    def lp_cost(self) -> Fraction:
        return self.sigma_star.cost


def run_pipeline(
    instance: Instance,
    cfg: Optional[PipelineConfig] = None,
    sigma_star: Optional[FractionalSolution] = None,
) -> PipelineResult:
    """Round a fractional solution (the LP optimum by default) to an integral open set.

    Any feasible solution of the natural relaxation may be passed as
    ``sigma_star``; the guarantees are relative to its cost.
    """
    cfg = cfg or PipelineConfig()
    require(cfg.merge_factor < 1, f"alpha={cfg.alpha} leaves no room to merge both roundings")
    if sigma_star is None:
        sigma_star = solve_lp(build_mmcc_lp(instance))
    alpha = cfg.alpha
    sigma, heavy, light = threshold(sigma_star, alpha)
    p1, p2 = partition_points(sigma, light, alpha, instance.clients)
    caps = scale_capacities(instance, heavy, light, cfg)
    require(not p1 or heavy, "points with little light flow but no heavy ball")

    sigma_bar = build_aux1(sigma, heavy, light, p1, cfg)
    sigma_hat, demands = build_aux2(sigma, light, p2, cfg)
    sigma_hat2 = double_and_cap(sigma_hat)
    aux1 = build_aux1_lp(instance, heavy, light, p1, caps)
    aux2 = build_aux2_lp(instance, light, p2, caps, demands)
    violations = {
        "aux1": check_lp_feasibility(sigma_bar, aux1),
        "aux2": check_lp_feasibility(sigma_hat, aux2),
        "aux2_doubled": check_lp_feasibility(sigma_hat2, aux2),
    }
    for name, bad in violations.items():
        if bad:
            require(False, f"{name} construction infeasible: {bad[0]}")
    require(sigma_bar.cost <= sigma_star.cost / alpha, "first auxiliary cost above cost*/alpha")
    require(sigma_hat.cost <= 10 * sigma_star.cost, "second auxiliary cost above 10 cost*")

    state = ClusterState.initial(instance, cfg, sigma_bar, caps, heavy, light, p1)
    trace = state.trace
    for p in sorted(p2):
        dropped = sum((sigma.x.get((h, p), ZERO) for h in heavy), ZERO)
        if dropped:
            trace.append(Event("dropped", {"point": p, "flow": dropped}))
    cluster_formation(state)
    if instance.variant is Variant.UNIFORM:
        part1 = select_balls_uniform(state)
    else:
        part1 = select_balls_monotonic(state)
    o_prime, x_prime, _ = round_aux2(sigma_hat2, instance, cfg, p2, caps, trace)
    rounded = combine(part1, o_prime, x_prime, instance, cfg)
    selected = sum(1 for b, roles in part1.provenance.items() if "H1" in roles)
    trace.append(
        Event(
            "summary",
            {
                "H1": len(heavy),
                "O": len(state.opened),
                "Oprime": len(o_prime),
                "selected": selected,
                "cost": rounded.cost,
            },
        )
    )
    return PipelineResult(
        instance, cfg, sigma_star, sigma, heavy, light, p1, p2, caps, sigma_bar,
        sigma_hat, demands, sigma_hat2, state, part1, o_prime, x_prime, rounded,
        trace, violations,
    )
