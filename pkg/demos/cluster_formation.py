"""
Watching clusters form
======================

Random small instances rarely have light balls, so this walk-through starts
from a hand-built fractional solution: heavy balls filled up to a sliver and
thirty light balls with tiny y values around them.
"""

from collections import Counter

from capcover import check_trace, run_pipeline
from capcover.field import format_rational
from capcover.scenarios import saturated

inst, sigma = saturated(1, "monotonic")
res = run_pipeline(inst, sigma_star=sigma)
print(f"{len(inst.balls)} balls, {inst.n_points} points, cost* = {format_rational(sigma.cost)}")
print("P1:", len(res.p1), "points   P2:", len(res.p2), "points")

# No light ball fits into a full heavy ball, so Cluster Formation must open one
# first; the flow it pulls frees room for the absorptions that follow.
for ev in res.trace:
    if ev.kind == "open":
        print(f"open light {ev['light']}: k = {format_rational(ev['k'])}, case {ev['case']}, "
              f"F = {format_rational(ev['F'])} from heavy {sorted(ev['from'])}")
    elif ev.kind == "absorb":
        print(f"  heavy {ev['heavy']} absorbs light {ev['light']} (flow {format_rational(ev['flow'])})")

print(Counter(ev.kind for ev in res.trace))

# Replaying the trace recomputes each heavy ball's running y-accumulation and
# checks every bound exactly.
rep = check_trace(res.trace, res.cfg, sigma.cost)
print(rep.format())

for ev in res.trace:
    if ev.kind == "select":
        print(f"cluster of {ev['cluster']}: case {ev['case']}, balls {ev['balls']}")
print("final cost:", res.rounded.cost)
