"""
Set cover inside capacitated covering
=====================================

Sets become unit balls, elements become points. With capacities large
enough to never bind, the fewest balls that can serve everything is exactly
a minimum set cover; points outside a set sit at least 3 from its centre.
"""

from capcover import from_set_cover, min_set_cover, optimal_cover

sets = [{0, 1, 2}, {2, 3}, {3, 4, 5}, {0, 5}, {1, 4}]
inst = from_set_cover(sets, capacity=6)

for b in inst.balls:
    row = [str(inst.space.dist[b.center][p]) for p in inst.clients]
    print(f"set {b.id}: distances to elements", " ".join(row))

print("min set cover:", min_set_cover(sets))
res = optimal_cover(inst)
print("oracle:", res.opt_size, "balls", res.open, f"({res.subsets_tested} subsets tried)")

# Tight capacities change the answer: two balls can no longer hold six points.
tight = from_set_cover(sets, capacity=2)
print("with U = 2:", optimal_cover(tight).opt_size)

# Expanding by 3 lets any ball reach any element of its component.
print("at expansion 3:", optimal_cover(inst, beta=3).opt_size)
