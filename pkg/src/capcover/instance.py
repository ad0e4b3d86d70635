"""Metric spaces, balls and covering instances.

An instance is an explicit distance matrix over a finite set of sites, a list
of balls centred on sites, and the subset of sites that must be covered (the
clients). Randomly generated instances use every site as a client; the
set-cover reduction adds ball centres as extra, non-client sites.
"""

from __future__ import annotations

import enum
import itertools
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import InfeasibleError, InstanceError
from .field import QSqrt5, format_rational

HEADER = "capcover-instance v1"


class Variant(enum.Enum):
    UNIFORM = "uniform"
    MONOTONIC = "monotonic"


@dataclass(frozen=True)
class MetricViolation:
    kind: str  # "shape" | "negative" | "diagonal" | "asymmetry" | "triangle"
    indices: tuple

    def __str__(self):
        return f"{self.kind} at {self.indices}"


@dataclass(frozen=True)
class MetricSpace:
    dist: tuple  # tuple of row tuples of Fraction

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "MetricSpace":
        return cls(tuple(tuple(Fraction(v) for v in row) for row in rows))

    @property
    def n_points(self) -> int:
        return len(self.dist)

    def __call__(self, i: int, j: int) -> Fraction:
        return self.dist[i][j]


def validate_metric(space: MetricSpace) -> Optional[MetricViolation]:
    """Return ``None`` if ``space`` is a (pseudo)metric, else the first violation.

    Checks run in the order shape, negativity, diagonal, symmetry, triangle
    inequality; triangle witnesses are ``(i, j, k)`` with
    ``d(i,k) > d(i,j) + d(j,k)``.
    """
    d = space.dist
    n = len(d)
    for i, row in enumerate(d):
        if len(row) != n:
            return MetricViolation("shape", (i,))
    for i in range(n):
        for j in range(n):
            if d[i][j] < 0:
                return MetricViolation("negative", (i, j))
    for i in range(n):
        if d[i][i] != 0:
            return MetricViolation("diagonal", (i, i))
    for i in range(n):
        for j in range(i + 1, n):
            if d[i][j] != d[j][i]:
                return MetricViolation("asymmetry", (i, j))
    for i in range(n):
        for j in range(n):
            dij = d[i][j]
            for k in range(n):
                if d[i][k] > dij + d[j][k]:
                    return MetricViolation("triangle", (i, j, k))
    return None


@dataclass(frozen=True)
class Ball:
    id: int
    center: int
    radius: Fraction
    capacity: int

    def size_key(self):
        """Sort key putting the largest ball first: radius, then capacity, then lower id."""
        return (-self.radius, -self.capacity, self.id)


@dataclass(frozen=True)
class Instance:
    space: MetricSpace
    balls: tuple
    variant: Variant
    clients: tuple = field(default=None)

    def __post_init__(self):
        if self.clients is None:
            object.__setattr__(self, "clients", tuple(range(self.space.n_points)))
        object.__setattr__(self, "balls", tuple(self.balls))

    @property
    def n_points(self) -> int:
        return self.space.n_points

    def dist(self, ball_id: int, point: int) -> Fraction:
        return self.space.dist[self.balls[ball_id].center][point]

    def covering(self, point: int, beta=1) -> list:
        return [b.id for b in self.balls if contains(self, b.id, point, beta)]

    def members(self, ball_id: int, beta=1) -> list:
        return [p for p in self.clients if contains(self, ball_id, p, beta)]

    def intersects(self, a: int, b: int) -> bool:
        """True if some site lies in both balls at their nominal radii."""
        ca, ra = self.balls[a].center, self.balls[a].radius
        cb, rb = self.balls[b].center, self.balls[b].radius
        d = self.space.dist
        return any(d[ca][s] <= ra and d[cb][s] <= rb for s in range(self.n_points))


def contains(instance: Instance, ball_id: int, point: int, beta=1) -> bool:
    """Exact test of ``d(c_i, p) <= beta * r_i``; ``beta`` may be rational or a QSqrt5."""
    ball = instance.balls[ball_id]
    d = instance.space.dist[ball.center][point]
    if isinstance(beta, QSqrt5):
        return QSqrt5.coerce(d) <= beta * ball.radius
    return d <= Fraction(beta) * ball.radius


def validate_instance(instance: Instance) -> None:
    """Raise ``InstanceError`` (or ``InfeasibleError`` for uncovered clients)."""
    bad = validate_metric(instance.space)
    if bad is not None:
        raise InstanceError(f"not a metric: {bad}")
    n = instance.n_points
    if len(set(instance.clients)) != len(instance.clients):
        raise InstanceError("duplicate client index")
    for p in instance.clients:
        if not 0 <= p < n:
            raise InstanceError(f"client {p} out of range")
    for pos, b in enumerate(instance.balls):
        if b.id != pos:
            raise InstanceError(f"ball at position {pos} has id {b.id}")
        if not 0 <= b.center < n:
            raise InstanceError(f"ball {b.id}: center out of range")
        if b.radius <= 0:
            raise InstanceError(f"ball {b.id}: radius must be positive")
        if int(b.capacity) != b.capacity or b.capacity < 1:
            raise InstanceError(f"ball {b.id}: capacity must be a positive integer")
    if instance.variant is Variant.UNIFORM:
        if len({b.capacity for b in instance.balls}) > 1:
            raise InstanceError("uniform variant requires equal capacities")
    else:
        for bi, bj in itertools.permutations(instance.balls, 2):
            if bi.radius >= bj.radius and bi.capacity < bj.capacity:
                raise InstanceError(
                    f"capacities not monotonic in radius: balls {bi.id}, {bj.id}"
                )
    for p in instance.clients:
        if not any(contains(instance, b.id, p) for b in instance.balls):
            raise InfeasibleError(f"point {p} is contained in no ball")


def make_instance(dist, balls: Sequence, variant, clients=None) -> Instance:
    """Build and validate an instance; ``balls`` holds ``(center, radius, capacity)``."""
    space = MetricSpace.from_rows(dist)
    bs = tuple(
        Ball(i, int(c), Fraction(r), int(u)) for i, (c, r, u) in enumerate(balls)
    )
    inst = Instance(space, bs, Variant(variant), None if clients is None else tuple(clients))
    validate_instance(inst)
    return inst


# ---------------------------------------------------------------- generators


def _all_assignable(inst: Instance) -> bool:
    from .assignment import feasible_with

    return feasible_with(inst, range(len(inst.balls)))


def _monotone_capacities(radii, draws):
    """Hand out sorted capacity draws by radius rank; equal radii share a capacity."""
    order = sorted(range(len(radii)), key=lambda i: radii[i])
    caps = [0] * len(radii)
    draws = sorted(draws)
    prev_r, prev_u = None, 0
    for rank, i in enumerate(order):
        u = max(draws[rank], prev_u)
        if radii[i] == prev_r:
            u = prev_u
        caps[i] = u
        prev_r, prev_u = radii[i], u
    return caps


def generate_random(
    n_points: int,
    n_balls: int,
    variant,
    seed: int,
    grid: int = 6,
    retries: int = 200,
) -> Instance:
    """Random instance on distinct integer grid points under the l1 metric.

    Centres are drawn from the points; radii start random and are then grown so
    that every point is covered at expansion 1. Capacities are redrawn until
    opening every ball admits a feasible assignment.
    """
    if n_points < 1 or n_balls < 1:
        raise ValueError("n_points and n_balls must be >= 1")
    variant = Variant(variant)
    rng = random.Random(seed)
    side = max(grid, int(n_points ** 0.5) + 1)
    cells = rng.sample([(x, y) for x in range(side) for y in range(side)], n_points)
    dist = [
        [Fraction(abs(a[0] - b[0]) + abs(a[1] - b[1])) for b in cells] for a in cells
    ]
    for _ in range(retries):
        centers = [rng.randrange(n_points) for _ in range(n_balls)]
        radii = [Fraction(rng.randint(1, 3)) for _ in range(n_balls)]
        for p in range(n_points):
            if not any(dist[c][p] <= r for c, r in zip(centers, radii)):
                k = min(range(n_balls), key=lambda i: (dist[centers[i]][p], i))
                radii[k] = dist[centers[k]][p]
        if variant is Variant.UNIFORM:
            lo = -(-n_points // n_balls)
            u = rng.randint(lo, max(lo, n_points))
            caps = [u] * n_balls
        else:
            caps = _monotone_capacities(
                radii, [rng.randint(1, n_points) for _ in range(n_balls)]
            )
        inst = Instance(
            MetricSpace.from_rows(dist),
            tuple(Ball(i, centers[i], radii[i], caps[i]) for i in range(n_balls)),
            variant,
        )
        if _all_assignable(inst):
            validate_instance(inst)
            return inst
    raise InfeasibleError(f"no feasible instance after {retries} attempts (seed={seed})")


def from_set_cover(sets: Sequence[Iterable], capacity: int, universe=None) -> Instance:
    """Capacitated-covering instance encoding a set-cover instance.

    Elements become client sites ``0..n-1`` (sorted), sets become unit balls
    centred on extra sites ``n..n+m-1``. Member distances are 1 and every other
    distance is the shortest path in the incidence graph, capped at
    ``max(3, n+m)`` for pairs in different components (the cap keeps the metric
    finite and is a metric itself).
    """
    fam = [frozenset(s) for s in sets]
    elems = sorted(set().union(*fam)) if universe is None else sorted(universe)
    for e in elems:
        if not any(e in s for s in fam):
            raise InfeasibleError(f"element {e!r} belongs to no set")
    n, m = len(elems), len(fam)
    index = {e: k for k, e in enumerate(elems)}
    size = n + m
    inf = None
    d = [[inf] * size for _ in range(size)]
    for v in range(size):
        d[v][v] = 0
    for s_idx, s in enumerate(fam):
        for e in s:
            a, b = index[e], n + s_idx
            d[a][b] = d[b][a] = 1
    for k in range(size):
        dk = d[k]
        for i in range(size):
            dik = d[i][k]
            if dik is None:
                continue
            di = d[i]
            for j in range(size):
                if dk[j] is None:
                    continue
                via = dik + dk[j]
                if di[j] is None or via < di[j]:
                    di[j] = via
    cap = max(3, size)
    rows = [[Fraction(cap if v is None else min(v, cap)) for v in row] for row in d]
    balls = tuple(Ball(s_idx, n + s_idx, Fraction(1), int(capacity)) for s_idx in range(m))
    inst = Instance(MetricSpace(tuple(tuple(r) for r in rows)), balls, Variant.UNIFORM, tuple(range(n)))
    validate_instance(inst)
    return inst


# ---------------------------------------------------------------- file format

_RAT_RE = re.compile(r"^(-?(?:0|[1-9]\d*))/([1-9]\d*)$")
_INT_RE = re.compile(r"^(?:0|[1-9]\d*)$")


def parse_rational(token: str) -> Fraction:
    m = _RAT_RE.match(token)
    if not m:
        raise InstanceError(f"malformed rational {token!r} (expected p/q)")
    p, q = int(m.group(1)), int(m.group(2))
    value = Fraction(p, q)
    if value.numerator != p or value.denominator != q:
        raise InstanceError(f"rational {token!r} is not in lowest terms")
    return value


def _parse_int(token: str) -> int:
    if not _INT_RE.match(token):
        raise InstanceError(f"malformed integer {token!r}")
    return int(token)


def format_instance(instance: Instance) -> str:
    lines = [HEADER, f"variant {instance.variant.value}", f"points {instance.n_points}", "dist"]
    for row in instance.space.dist:
        lines.append(" ".join(format_rational(v) for v in row))
    if tuple(instance.clients) != tuple(range(instance.n_points)):
        lines.append("clients " + " ".join(str(p) for p in instance.clients))
    lines.append(f"balls {len(instance.balls)}")
    for b in instance.balls:
        lines.append(f"{b.id} {b.center} {format_rational(b.radius)} {b.capacity}")
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> Instance:
    """Strict parser for the line-oriented instance format; validates the result."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    pos = 0

    def take(prefix=None):
        nonlocal pos
        if pos >= len(lines):
            raise InstanceError("unexpected end of file")
        line = lines[pos]
        pos += 1
        if prefix is not None:
            parts = line.split(" ")
            if parts[0] != prefix:
                raise InstanceError(f"line {pos}: expected {prefix!r}, got {line!r}")
            return parts[1:]
        return line

    if take() != HEADER:
        raise InstanceError("missing header")
    rest = take("variant")
    v = rest[0] if len(rest) == 1 else None
    if v not in ("uniform", "monotonic"):
        raise InstanceError(f"unknown variant {v!r}")
    rest = take("points")
    if len(rest) != 1:
        raise InstanceError("malformed points line")
    n = _parse_int(rest[0])
    if take() != "dist":
        raise InstanceError("expected 'dist'")
    rows = []
    for _ in range(n):
        toks = take().split(" ")
        if len(toks) != n:
            raise InstanceError(f"line {pos}: expected {n} entries")
        rows.append(tuple(parse_rational(t) for t in toks))
    clients = None
    if pos < len(lines) and lines[pos].startswith("clients"):
        clients = tuple(_parse_int(t) for t in take("clients"))
    rest = take("balls")
    if len(rest) != 1:
        raise InstanceError("malformed balls line")
    m = _parse_int(rest[0])
    balls = []
    for k in range(m):
        toks = take().split(" ")
        if len(toks) != 4:
            raise InstanceError(f"line {pos}: expected 'id center radius capacity'")
        bid, center = _parse_int(toks[0]), _parse_int(toks[1])
        if bid != k:
            raise InstanceError(f"line {pos}: ball ids must be 0..{m - 1} in order")
        balls.append(Ball(bid, center, parse_rational(toks[2]), _parse_int(toks[3])))
    if pos != len(lines):
        raise InstanceError(f"trailing content at line {pos + 1}")
    inst = Instance(MetricSpace(tuple(rows)), tuple(balls), Variant(v), clients)
    validate_instance(inst)
    return inst


def read_instance(path) -> Instance:
    with open(path) as fh:
        return parse_instance(fh.read())


def write_instance(instance: Instance, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_instance(instance))
