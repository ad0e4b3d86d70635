"""Integral assignments through maximum flow.

A solution whose open set is integral but whose point-to-ball fractions are
not can always be made fully integral: capacities are integers, so the
bipartite transportation network has an integral maximum flow of the same
value. The same network decides feasibility of a fixed open set, which the
exact oracle relies on.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import InfeasibleError
from .instance import Instance, contains


@dataclass
class FlowNetwork:
    n_nodes: int
    source: int
    sink: int
    arcs: list = field(default_factory=list)  # (tail, head, capacity)
    labels: dict = field(default_factory=dict)

    def add_arc(self, tail: int, head: int, capacity: int) -> int:
        if capacity < 0 or int(capacity) != capacity:
            raise ValueError("arc capacities must be non-negative integers")
        self.arcs.append((tail, head, int(capacity)))
        return len(self.arcs) - 1


@dataclass
class FlowResult:
    value: int
    arc_flow: list
    cut: frozenset  # source side of a minimum cut

    def cut_capacity(self, network: FlowNetwork) -> int:
        return sum(
            cap for (u, v, cap) in network.arcs if u in self.cut and v not in self.cut
        )


def max_flow(network: FlowNetwork) -> FlowResult:
    """Edmonds-Karp: breadth-first augmenting paths, arcs scanned in insertion order."""
    n = network.n_nodes
    head, cap, adj = [], [], [[] for _ in range(n)]
    for (u, v, c) in network.arcs:
        adj[u].append(len(head))
        head.append(v)
        cap.append(c)
        adj[v].append(len(head))
        head.append(u)
        cap.append(0)
    s, t = network.source, network.sink
    value = 0
    while True:
        parent = [-1] * n
        parent[s] = -2
        queue = deque([s])
        while queue and parent[t] == -1:
            u = queue.popleft()
            for e in adj[u]:
                if cap[e] > 0 and parent[head[e]] == -1:
                    parent[head[e]] = e
                    queue.append(head[e])
        if parent[t] == -1:
            break
        push, v = None, t
        while v != s:
            e = parent[v]
            push = cap[e] if push is None else min(push, cap[e])
            v = head[e ^ 1]
        v = t
        while v != s:
            e = parent[v]
            cap[e] -= push
            cap[e ^ 1] += push
            v = head[e ^ 1]
        value += push
    reach = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for e in adj[u]:
            if cap[e] > 0 and head[e] not in reach:
                reach.add(head[e])
                queue.append(head[e])
    flows = [cap[2 * k + 1] for k in range(len(network.arcs))]
    return FlowResult(value, flows, frozenset(reach))


def assignment_network(instance: Instance, factors: dict) -> FlowNetwork:
    """Source -> client (1) -> open ball within its factor (1) -> sink (capacity).

    ``factors`` maps each open ball id to the expansion it may use.
    """
    clients = list(instance.clients)
    opened = sorted(factors)
    n_nodes = 2 + len(clients) + len(opened)
    net = FlowNetwork(n_nodes, 0, n_nodes - 1)
    pnode = {p: 1 + k for k, p in enumerate(clients)}
    bnode = {b: 1 + len(clients) + k for k, b in enumerate(opened)}
    for p in clients:
        net.add_arc(0, pnode[p], 1)
    for p in clients:
        for b in opened:
            if contains(instance, b, p, factors[b]):
                arc = net.add_arc(pnode[p], bnode[b], 1)
                net.labels[arc] = (p, b)
    for b in opened:
        net.add_arc(bnode[b], net.sink, instance.balls[b].capacity)
    return net


def feasible_with(instance: Instance, ball_ids, beta=1) -> bool:
    """Whether the given balls, all expanded by ``beta``, can serve every client."""
    factors = {b: beta for b in ball_ids}
    net = assignment_network(instance, factors)
    return max_flow(net).value == len(instance.clients)


def integral_assignment(instance: Instance, factors: dict) -> dict:
    """Point -> ball map using only the open balls in ``factors``.

    Raises ``InfeasibleError`` carrying the min-cut source side as witness when
    some client cannot be served.
    """
    net = assignment_network(instance, factors)
    res = max_flow(net)
    if res.value < len(instance.clients):
        raise InfeasibleError(
            f"max flow {res.value} < {len(instance.clients)} clients", witness=res.cut
        )
    phi = {}
    for arc, (p, b) in net.labels.items():
        if res.arc_flow[arc] == 1:
            phi[p] = b
    return phi


def integralize(instance: Instance, rounded) -> dict:
    """Integral assignment for a rounded solution, honouring each ball's recorded expansion."""
    return integral_assignment(instance, dict(rounded.open))
