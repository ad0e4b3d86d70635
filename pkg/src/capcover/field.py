"""Exact arithmetic in the quadratic field Q(sqrt 5).

Expansion factors of the uniform-capacity rounding involve the golden ratio,
so coverage tests ``d <= beta * r`` are carried out on numbers ``a + b*sqrt5``
with rational ``a`` and ``b``. Comparison reduces to the sign of such a number,
which is decided without floating point.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from numbers import Rational

_RATIONAL = r"-?\d+(?:/\d+)?"
_SURD_RE = re.compile(rf"^({_RATIONAL})\+({_RATIONAL})\*sqrt5$")


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@total_ordering
class QSqrt5:
    """The number ``a + b*sqrt(5)`` with exact rational parts."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = _as_fraction(a)
        self.b = _as_fraction(b)

    @classmethod
    def coerce(cls, value) -> "QSqrt5":
        if isinstance(value, QSqrt5):
            return value
        return cls(value, 0)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with 5 b^2
        diff = a * a - 5 * b * b
        if a > 0:
            return (diff > 0) - (diff < 0)
        return (diff < 0) - (diff > 0)

    def conjugate(self) -> "QSqrt5":
        return QSqrt5(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 5 * self.b * self.b

    def __add__(self, other):
        try:
            o = QSqrt5.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt5(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt5(-self.a, -self.b)

    def __sub__(self, other):
        try:
            o = QSqrt5.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt5(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = QSqrt5.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt5(self.a * o.a + 5 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = QSqrt5.coerce(other)
        except TypeError:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt5)")
        num = self * o.conjugate()
        return QSqrt5(num.a / n, num.b / n)

    def __rtruediv__(self, other):
        return QSqrt5.coerce(other) / self

    def __eq__(self, other):
        try:
            o = QSqrt5.coerce(other)
        except TypeError:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __lt__(self, other):
        try:
            o = QSqrt5.coerce(other)
        except TypeError:
            return NotImplemented
        return (self - o).sign() < 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __float__(self):
        return float(self.a) + float(self.b) * 5 ** 0.5

    def __repr__(self):
        return f"QSqrt5({self.a}, {self.b})"

    def __str__(self):
        return format_factor(self)


def format_rational(q: Fraction) -> str:
    """Canonical ``p/q`` text for an exact rational (denominator always shown)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def format_factor(value) -> str:
    """Render an expansion factor as ``p/q``, ``2+sqrt5`` or ``p/q+p/q*sqrt5``."""
    v = QSqrt5.coerce(value)
    if v.b == 0:
        return format_rational(v.a)
    if v == TWO_PLUS_SQRT5:
        return "2+sqrt5"
    return f"{format_rational(v.a)}+{format_rational(v.b)}*sqrt5"


def parse_factor(text: str) -> QSqrt5:
    text = text.strip()
    if text == "2+sqrt5":
        return TWO_PLUS_SQRT5
    m = _SURD_RE.match(text)
    if m:
        return QSqrt5(Fraction(m.group(1)), Fraction(m.group(2)))
    if re.fullmatch(_RATIONAL, text):
        return QSqrt5(Fraction(text))
    raise ValueError(f"not an expansion factor: {text!r}")


SQRT5 = QSqrt5(0, 1)
GOLDEN = QSqrt5(Fraction(1, 2), Fraction(1, 2))
TWO_PLUS_SQRT5 = QSqrt5(2, 1)
