"""
Rounding a small random instance
================================

Generate an instance, solve its relaxation exactly, round it and check the
result against the exact optimum.
"""

from capcover import (
    build_mmcc_lp,
    check_solution,
    format_instance,
    generate_random,
    greedy_cover,
    integralize,
    optimal_cover,
    run_pipeline,
    solve_lp,
)
from capcover.cli import beta_for
from capcover.field import format_factor, format_rational

inst = generate_random(7, 5, "monotonic", seed=15)
print(format_instance(inst))

# the relaxation, solved over the rationals
sigma = solve_lp(build_mmcc_lp(inst))
print("LP optimum:", format_rational(sigma.cost))
for b, v in sorted(sigma.y.items()):
    print(f"  y[{b}] = {format_rational(v)}")

# rounding: every open ball comes with the expansion it may use
res = run_pipeline(inst, sigma_star=sigma)
print("heavy:", sorted(res.heavy), "light:", sorted(res.light))
for b, f in sorted(res.rounded.open.items()):
    print(f"  ball {b} open, expansion {format_factor(f)}")

# one ball per point, by max flow over the recorded expansions
phi = integralize(inst, res.rounded)
print("assignment:", dict(sorted(phi.items())))

rep = check_solution(inst, res.rounded, beta_for(inst.variant), lp_opt=sigma.cost)
print(rep.format())

# how far from optimal?
opt = optimal_cover(inst)
print("OPT:", opt.opt_size, "open", opt.open)
print("greedy:", greedy_cover(inst).cost)
print("pipeline:", res.rounded.cost)
