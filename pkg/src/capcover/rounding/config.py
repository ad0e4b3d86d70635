from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from ..field import GOLDEN, QSqrt5

TAGS = ("H1", "L1", "L2")


class Copy(NamedTuple):
    """One copy of a ball: heavy balls get an H1 copy, light balls L1 and L2 copies."""

    ball: int
    tag: str

    def __str__(self):
        return f"{self.tag}:{self.ball}"


@dataclass(frozen=True)
class PipelineConfig:
    alpha: Fraction = Fraction(1, 60)
    light_capacity_divisor: int = 10
    top_k: int = 10
    aux2_group_upper: Fraction = None  # defaults to 21 * alpha
    aux2_scale: Fraction = None  # defaults to 1 / (7 * alpha)
    golden_c: QSqrt5 = field(default=GOLDEN)

    def __post_init__(self):
        a = Fraction(self.alpha)
        object.__setattr__(self, "alpha", a)
        if not 0 < a <= Fraction(1, 60):
            raise ValueError(f"alpha must satisfy 0 < alpha <= 1/60, got {a}")
        if self.aux2_group_upper is None:
            object.__setattr__(self, "aux2_group_upper", 21 * a)
        if self.aux2_scale is None:
            object.__setattr__(self, "aux2_scale", 1 / (7 * a))
        if self.top_k != self.light_capacity_divisor:
            # the capacity argument for clusters needs U_h <= top_k * U_h / divisor
            raise ValueError("top_k must equal light_capacity_divisor")

    @property
    def merge_factor(self) -> Fraction:
        """Fraction of U_i a light ball may use when opened in both auxiliary roundings."""
        return (1 + Fraction(self.aux2_scale)) / self.light_capacity_divisor

    @property
    def cost_bound_factor(self) -> Fraction:
        """Final cost bound as a multiple of the LP cost: (90 + 600 alpha) / alpha."""
        return (90 + 600 * self.alpha) / self.alpha

    @property
    def selection_bound_factor(self) -> Fraction:
        return (70 + 600 * self.alpha) / self.alpha
