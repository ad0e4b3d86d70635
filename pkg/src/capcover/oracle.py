"""Ground-truth solvers for small instances.

``optimal_cover`` and ``greedy_cover`` bracket the integral optimum from
both sides; ``lp_vertex_optimum`` recomputes the LP optimum without the
simplex code, and ``min_set_cover`` is the brute force that the set-cover
reduction is checked against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import cdd

from .assignment import feasible_with, integral_assignment, max_flow, assignment_network
from .errors import BudgetExceeded, InfeasibleError
from .instance import Instance, contains
from .solution import RoundedSolution


@dataclass
class OracleResult:
    opt_size: int
    open: tuple  # ball ids, ascending
    phi: dict  # point -> ball
    subsets_tested: int


def optimal_cover(instance: Instance, beta=1, budget: int = 20) -> OracleResult:
    """Smallest set of balls that, expanded by ``beta``, admits an integral assignment.

    Sizes are tried in increasing order and subsets lexicographically, so the
    witness is the lexicographically first optimal subset. A size is skipped
    when even its largest capacities cannot hold every client.
    """
    m = len(instance.balls)
    if m > budget:
        raise BudgetExceeded(f"{m} balls exceed the enumeration budget of {budget}")
    n = len(instance.clients)
    caps = sorted((b.capacity for b in instance.balls), reverse=True)
    tested = 0
    for k in range(1, m + 1):
        if sum(caps[:k]) < n:
            continue
        for subset in itertools.combinations(range(m), k):
            tested += 1
            if feasible_with(instance, subset, beta):
                phi = integral_assignment(instance, {b: beta for b in subset})
                return OracleResult(k, subset, phi, tested)
    raise InfeasibleError(f"no subset of balls serves every client at expansion {beta}")


def greedy_cover(instance: Instance) -> RoundedSolution:
    """Capacity-aware greedy at expansion 1.

    Each step opens the ball that can take the most unassigned clients,
    ``min(U, uncovered members)``, ties to the lower id, and gives it its
    lowest-id uncovered members. If that stalls while clients remain (the
    open balls are full and no unused ball reaches the rest), the remaining
    steps open the ball that most increases the max-flow value of the open
    set, and the assignment is recomputed by max flow at the end.
    """
    unassigned = list(instance.clients)
    members = {b.id: set(instance.members(b.id)) for b in instance.balls}
    chosen, phi = [], {}
    while unassigned:
        best, gain = None, 0
        for b in instance.balls:
            if b.id in chosen:
                continue
            g = min(b.capacity, sum(1 for p in unassigned if p in members[b.id]))
            if g > gain:
                best, gain = b.id, g
        if best is None:
            break
        chosen.append(best)
        take = [p for p in unassigned if p in members[best]][:gain]
        for p in take:
            phi[p] = best
        unassigned = [p for p in unassigned if p not in phi]
    if unassigned:
        n = len(instance.clients)
        value = max_flow(assignment_network(instance, {b: 1 for b in chosen})).value
        while value < n:
            rest = [b.id for b in instance.balls if b.id not in chosen]
            if not rest:
                raise InfeasibleError("greedy stalled: the instance is infeasible at expansion 1")
            scored = [
                (max_flow(assignment_network(instance, {c: 1 for c in chosen + [b]})).value, -b)
                for b in rest
            ]
            value, neg = max(scored)
            chosen.append(-neg)
        phi = integral_assignment(instance, {b: 1 for b in chosen})
    return RoundedSolution.from_assignment({b: 1 for b in chosen}, phi)


def min_set_cover(sets, universe=None) -> int:
    """Brute-force minimum number of sets whose union is the universe."""
    fam = [frozenset(s) for s in sets]
    target = frozenset().union(*fam) if universe is None else frozenset(universe)
    if not target <= frozenset().union(*fam):
        raise InfeasibleError("some element belongs to no set")
    if not target:
        return 0
    for k in range(1, len(fam) + 1):
        for combo in itertools.combinations(fam, k):
            if target <= frozenset().union(*combo):
                return k
    raise AssertionError("unreachable")


# ------------------------------------------------------------- LP by vertices


def cut_constraints(instance: Instance) -> list:
    """The LP projected onto y: rows ``(a, |A|)`` meaning ``sum_i a_i y_i >= |A|``.

    For fixed y the relaxation is a flow problem, and its min cut over a
    client set ``A`` gives ``a_i = min(U_i, |A ∩ N_i|)``. Duplicates and rows
    dominated by another (smaller coefficients, no smaller right-hand side)
    are removed.
    """
    clients = list(instance.clients)
    nbrs = [frozenset(p for p in clients if contains(instance, b.id, p)) for b in instance.balls]
    rows = {}
    for r in range(1, len(clients) + 1):
        for subset in itertools.combinations(clients, r):
            s = frozenset(subset)
            a = tuple(min(b.capacity, len(s & nbrs[i])) for i, b in enumerate(instance.balls))
            rows[a] = max(rows.get(a, 0), r)
    items = list(rows.items())
    kept = []
    for a, r in items:
        dominated = any(
            (a2, r2) != (a, r) and r2 >= r and all(x2 <= x for x2, x in zip(a2, a))
            for a2, r2 in items
        )
        if not dominated:
            kept.append((a, r))
    return sorted(kept)


def lp_vertex_optimum(instance: Instance) -> Fraction:
    """Optimum of the natural relaxation as the best vertex of its y-projection.

    The vertices of ``{y : cut rows, 0 <= y <= 1}`` are enumerated exactly by
    double description (cddlib over rationals); the projection is a bounded
    polytope, so the minimum of ``sum y`` over its vertices is the LP optimum.
    """
    m = len(instance.balls)
    rows = [[-r] + list(a) for a, r in cut_constraints(instance)]
    rows += [[0] + [1 if j == i else 0 for j in range(m)] for i in range(m)]
    rows += [[1] + [-1 if j == i else 0 for j in range(m)] for i in range(m)]
    mat = cdd.Matrix(rows, number_type="fraction")
    mat.rep_type = cdd.RepType.INEQUALITY
    gens = cdd.Polyhedron(mat).get_generators()
    values = [sum((Fraction(v) for v in g[1:]), Fraction(0)) for g in gens if g[0] == 1]
    if not values:
        raise InfeasibleError("relaxation has no feasible vertex")
    return min(values)
