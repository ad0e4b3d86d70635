"""Rounded (integral-open) solutions and the solution file format."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InstanceError
from .field import QSqrt5, format_factor, parse_factor

HEADER = "capcover-solution v1"
ZERO = Fraction(0)


@dataclass
class RoundedSolution:
    """Open balls with the expansion each may use, plus a (possibly fractional) assignment.

    ``open`` maps ball id to its expansion factor (a ``QSqrt5``), ``x`` maps
    ``(ball, point)`` to assigned flow, and ``provenance`` maps ball id to the
    set of roles it was opened in (``"H1"``, ``"O"``, ``"O'"``).
    """

    open: dict = field(default_factory=dict)
    x: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    @property
    def cost(self) -> int:
        return len(self.open)

    def add(self, ball: int, factor, role: str) -> None:
        f = QSqrt5.coerce(factor)
        cur = self.open.get(ball)
        self.open[ball] = f if cur is None or f > cur else cur
        self.provenance.setdefault(ball, set()).add(role)

    def assign(self, ball: int, point: int, amount) -> None:
        if amount:
            self.x[(ball, point)] = self.x.get((ball, point), ZERO) + Fraction(amount)

    def load(self, ball: int) -> Fraction:
        return sum((v for (b, _), v in self.x.items() if b == ball), ZERO)

    def inflow(self, point: int) -> Fraction:
        return sum((v for (_, p), v in self.x.items() if p == point), ZERO)

    @property
    def max_factor(self) -> QSqrt5:
        return max(self.open.values(), default=QSqrt5(0))

    @classmethod
    def from_assignment(cls, factors: dict, phi: dict) -> "RoundedSolution":
        sol = cls(open={b: QSqrt5.coerce(f) for b, f in factors.items()})
        for p, b in phi.items():
            sol.x[(b, p)] = Fraction(1)
        return sol


def format_solution(factors: dict, phi: dict) -> str:
    """``open`` line of ``id:expansion`` pairs, then one ``assign point ball`` line per client."""
    lines = [HEADER]
    lines.append("open " + " ".join(f"{b}:{format_factor(factors[b])}" for b in sorted(factors)))
    for p in sorted(phi):
        lines.append(f"assign {p} {phi[p]}")
    return "\n".join(lines) + "\n"


def parse_solution(text: str):
    """Returns ``(factors, phi)``."""
    lines = text.splitlines()
    if not lines or lines[0] != HEADER:
        raise InstanceError("missing solution header")
    if len(lines) < 2 or not lines[1].startswith("open"):
        raise InstanceError("expected 'open' line")
    factors = {}
    for tok in lines[1].split()[1:]:
        b, _, f = tok.partition(":")
        factors[int(b)] = parse_factor(f)
    phi = {}
    for line in lines[2:]:
        parts = line.split()
        if len(parts) != 3 or parts[0] != "assign":
            raise InstanceError(f"bad assignment line {line!r}")
        phi[int(parts[1])] = int(parts[2])
    return factors, phi
