"""
Why 2 + sqrt5 and not 4.24
==========================

With uniform capacities a cluster may be handed to its light balls. A point
the heavy ball served can then end up almost (2 + sqrt5) radii from its new
centre. The instance below gets within 1/1000 of that.
"""

from capcover import check_solution, run_pipeline
from capcover.field import TWO_PLUS_SQRT5, format_factor, format_rational
from capcover.scenarios import tight_uniform

inst, sigma, far = tight_uniform()
res = run_pipeline(inst, sigma_star=sigma)

for ev in res.trace:
    if ev.kind == "select":
        print("selection case", ev["case"], "factor", format_factor(ev["factors"][0]))

# who serves the far point, and from how far away?
for (b, p), v in res.rounded.x.items():
    if p == far:
        d = inst.dist(b, p)
        print(f"point {p} <- ball {b}: distance {format_rational(d)}, radius {inst.balls[b].radius}")

print("2+sqrt5 is about", float(TWO_PLUS_SQRT5.a) + float(TWO_PLUS_SQRT5.b) * 5 ** 0.5)

ok = check_solution(inst, res.rounded, TWO_PLUS_SQRT5)
print("at 2+sqrt5:", "pass" if ok.ok else "fail")

short = check_solution(inst, res.rounded, TWO_PLUS_SQRT5 - TWO_PLUS_SQRT5.coerce(1) / 1000)
print("at 2+sqrt5 - 1/1000:", "pass" if short.ok else "fail")
for c in short.failures():
    print(" ", c.name, "->", c.witness)
