"""Parameter symbols and linear angle expressions.

A circuit parameter theta is always consumed through rotation gates whose
matrices use theta/2, so every symbol here stands for the *half* angle
s = theta/2.  Angle expressions, by contrast, are written over the full
angles (that is what appears in circuit text like ``rz(theta - phi)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class ParamSymbol:
    """A declared circuit parameter; ``id`` follows declaration order."""

    id: int
    name: str

    def __repr__(self):
        return f"ParamSymbol({self.id}, {self.name!r})"


class ParamTable:
    """Bijective name <-> symbol registry, ids dense in declaration order."""

    def __init__(self):
        self._by_name: dict[str, ParamSymbol] = {}
        self._by_id: list[ParamSymbol] = []

    def declare(self, name: str) -> ParamSymbol:
        if name in self._by_name:
            raise ValueError(f"parameter {name!r} declared twice")
        sym = ParamSymbol(len(self._by_id), name)
        self._by_name[name] = sym
        self._by_id.append(sym)
        return sym

    def lookup(self, name: str) -> ParamSymbol:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown parameter {name!r}") from None

    def by_id(self, var_id: int) -> ParamSymbol:
        return self._by_id[var_id]

    def __len__(self):
        return len(self._by_id)

    def __iter__(self):
        return iter(self._by_id)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def names(self) -> list[str]:
        return [s.name for s in self._by_id]


@dataclass(frozen=True)
class AngleExpr:
    """Integer-linear combination of full angles plus a real constant.

    ``coeffs`` maps symbols to the integer multiplier of the full angle;
    zero multipliers are never stored.  The constant is kept exactly as a
    plain rational plus a rational multiple of pi so circuit text
    round-trips losslessly.
    """

    coeffs: tuple[tuple[ParamSymbol, int], ...] = ()
    const_rat: Fraction = Fraction(0)
    const_pi: Fraction = Fraction(0)

    @property
    def constant(self) -> float:
        return float(self.const_rat) + float(self.const_pi) * math.pi

    @staticmethod
    def build(coeffs: dict[ParamSymbol, int],
              const_rat=Fraction(0), const_pi=Fraction(0)) -> "AngleExpr":
        items = tuple(sorted(((s, n) for s, n in coeffs.items() if n != 0),
                             key=lambda it: it[0].id))
        return AngleExpr(items, Fraction(const_rat), Fraction(const_pi))

    @staticmethod
    def from_symbol(sym: ParamSymbol, n: int = 1) -> "AngleExpr":
        return AngleExpr.build({sym: n})

    @staticmethod
    def const(const_rat=Fraction(0), const_pi=Fraction(0)) -> "AngleExpr":
        return AngleExpr((), Fraction(const_rat), Fraction(const_pi))

    def __neg__(self) -> "AngleExpr":
        return AngleExpr(tuple((s, -n) for s, n in self.coeffs),
                         -self.const_rat, -self.const_pi)

    def __add__(self, other: "AngleExpr") -> "AngleExpr":
        acc = {s: n for s, n in self.coeffs}
        for s, n in other.coeffs:
            acc[s] = acc.get(s, 0) + n
        return AngleExpr.build(acc, self.const_rat + other.const_rat,
                               self.const_pi + other.const_pi)

    def __sub__(self, other: "AngleExpr") -> "AngleExpr":
        return self + (-other)

    def symbols(self) -> list[ParamSymbol]:
        return [s for s, _ in self.coeffs]

    def evaluate(self, full_angles: dict[ParamSymbol, float]) -> float:
        """Numeric value given full-angle parameter values."""
        val = self.constant
        for s, n in self.coeffs:
            val += n * full_angles[s]
        return val

    def is_constant(self) -> bool:
        return not self.coeffs
