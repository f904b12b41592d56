"""Canonical trigonometric polynomials over half-angle symbols.

A polynomial is a finite sum  sum_k c_k * prod_i sin(s_i)^{a_ki} cos(s_i)^{b_ki}
with complex coefficients, sin exponents in {0, 1} (reduced through
sin^2 = 1 - cos^2) and terms kept strictly sorted, so two polynomials
represent the same function exactly when their term lists are equal.
"""

from __future__ import annotations

import math

from . import _kernels as K
from .params import AngleExpr, ParamSymbol

EPS = 1e-10


class MissingParameterError(KeyError):
    """An evaluation assignment does not cover a required symbol."""

    def __init__(self, var_id):
        super().__init__(var_id)
        self.var_id = var_id

    def __str__(self):
        return f"no value supplied for parameter variable {self.key()}"

    def key(self):
        return self.args[0]


class TrigPoly:
    """Immutable canonical trigonometric polynomial."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        object.__setattr__(self, "terms", tuple(terms))

    def __setattr__(self, name, value):
        raise AttributeError("TrigPoly is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero() -> "TrigPoly":
        return _ZERO

    @staticmethod
    def one() -> "TrigPoly":
        return _ONE

    @staticmethod
    def const(c: complex) -> "TrigPoly":
        if abs(c) <= EPS:
            return _ZERO
        return TrigPoly((((), complex(c)),))

    @staticmethod
    def sin(sym: ParamSymbol) -> "TrigPoly":
        return TrigPoly(((((sym.id, 1, 0),), 1.0 + 0.0j),))

    @staticmethod
    def cos(sym: ParamSymbol) -> "TrigPoly":
        return TrigPoly(((((sym.id, 0, 1),), 1.0 + 0.0j),))

    # -- ring operations ------------------------------------------------

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        return TrigPoly(K.add_terms(self.terms, other.terms, EPS))

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-other)

    def __neg__(self) -> "TrigPoly":
        return TrigPoly(tuple((m, -c) for m, c in self.terms))

    def __mul__(self, other: "TrigPoly") -> "TrigPoly":
        return TrigPoly(K.mul_terms(self.terms, other.terms, EPS))

    def scale(self, c: complex) -> "TrigPoly":
        return TrigPoly(K.scale_terms(self.terms, complex(c), EPS))

    def conjugate(self) -> "TrigPoly":
        return TrigPoly(K.conj_terms(self.terms))

    # -- queries --------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == ())

    def constant_value(self) -> complex:
        if not self.terms:
            return 0.0 + 0.0j
        if not self.is_constant:
            raise ValueError("polynomial is not constant")
        return self.terms[0][1]

    def variables(self) -> set[int]:
        out = set()
        for mono, _ in self.terms:
            for v, _, _ in mono:
                out.add(v)
        return out

    def depends_on(self, sym: ParamSymbol) -> bool:
        """Syntactic dependence; equals semantic dependence by canonicity."""
        for mono, _ in self.terms:
            for v, a, b in mono:
                if v == sym.id and (a or b):
                    return True
        return False

    def leading_coeff(self) -> complex:
        """Coefficient of the order-smallest term (0 for the zero poly)."""
        if not self.terms:
            return 0.0 + 0.0j
        return self.terms[0][1]

    def evaluate(self, assignment: dict[ParamSymbol, float]) -> complex:
        """Value at half-angle values s_i; raises on missing symbols."""
        values = {s.id: float(v) for s, v in assignment.items()}
        return self.evaluate_by_id(values)

    def evaluate_by_id(self, values: dict[int, float]) -> complex:
        total = 0.0 + 0.0j
        for mono, coeff in self.terms:
            factor = 1.0
            for v, a, b in mono:
                if v not in values:
                    raise MissingParameterError(v)
                x = values[v]
                if a:
                    factor *= math.sin(x)
                if b:
                    factor *= math.cos(x) ** b
            total += coeff * factor
        return total

    def approx_equal(self, other: "TrigPoly", tol: float = 1e-9) -> bool:
        if len(self.terms) != len(other.terms):
            return False
        for (m1, c1), (m2, c2) in zip(self.terms, other.terms):
            if m1 != m2 or abs(c1 - c2) > tol:
                return False
        return True

    # -- hashing / equality (exact on the canonical form) ---------------

    def __eq__(self, other):
        return isinstance(other, TrigPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        return f"TrigPoly({format_poly(self)})"


_ZERO = TrigPoly(())
_ONE = TrigPoly((((), 1.0 + 0.0j),))


def compare_monomials(m1, m2) -> int:
    """-1, 0, 1 under the term order sin(x0) < cos(x0) < sin(x1) < ..."""
    return K.compare_monomials(m1, m2)


def monomial_product(m1, m2) -> TrigPoly:
    """Canonical polynomial equal to the product of two monomials."""
    return TrigPoly(K.canonicalize(K.mono_mul_pair(m1, m2), EPS))


def common_factor(f: TrigPoly, g: TrigPoly, extract_scalar: bool = True):
    """Factor ``(h, f', g')`` with ``f = h*f'`` and ``g = h*g'``.

    ``h`` is the greatest monomial dividing every term of both inputs,
    scaled (when ``extract_scalar``) by the leading coefficient of the
    first nonzero quotient so that quotient leads with coefficient 1.
    """
    m = K.gcd_mono(f.terms, g.terms)
    if extract_scalar:
        if f.terms:
            c = K.div_terms(f.terms, m, 1)[0][1]
        elif g.terms:
            c = K.div_terms(g.terms, m, 1)[0][1]
        else:
            c = 1.0 + 0.0j
        if abs(c - 1.0) <= EPS:  # keeps repeated extraction a fixed point
            c = 1.0 + 0.0j
    else:
        c = 1.0 + 0.0j
    h = TrigPoly(((m, c),)) if (m or c != 1.0 + 0.0j) else TrigPoly.one()
    fq = TrigPoly(K.div_terms(f.terms, m, c))
    gq = TrigPoly(K.div_terms(g.terms, m, c))
    return h, fq, gq


def expand_half_angle(expr: AngleExpr) -> tuple[TrigPoly, TrigPoly]:
    """(cos, sin) of half the given full-angle expression.

    Writing expr/2 = sum_i n_i s_i + c/2, the result is expanded exactly
    through the angle-addition formulas; the constant part is folded
    numerically into the coefficients.
    """
    half = expr.constant / 2.0
    cos_acc = TrigPoly.const(math.cos(half))
    sin_acc = TrigPoly.const(math.sin(half))
    for sym, n in expr.coeffs:
        cn, sn = _cos_sin_multiple(sym, n)
        cos_new = cos_acc * cn - sin_acc * sn
        sin_new = sin_acc * cn + cos_acc * sn
        cos_acc, sin_acc = cos_new, sin_new
    return cos_acc, sin_acc


def expand_cos(expr: AngleExpr) -> TrigPoly:
    return expand_half_angle(expr)[0]


def expand_sin(expr: AngleExpr) -> TrigPoly:
    return expand_half_angle(expr)[1]


def _cos_sin_multiple(sym: ParamSymbol, n: int) -> tuple[TrigPoly, TrigPoly]:
    """(cos(n*s), sin(n*s)) by repeated angle addition."""
    c1, s1 = TrigPoly.cos(sym), TrigPoly.sin(sym)
    c, s = TrigPoly.one(), TrigPoly.zero()
    for _ in range(abs(n)):
        c, s = c * c1 - s * s1, s * c1 + c * s1
    if n < 0:
        s = -s
    return c, s


def format_poly(poly: TrigPoly, names: dict[int, str] | None = None) -> str:
    """Deterministic rendering: terms in canonical order."""
    if not poly.terms:
        return "0"
    parts = []
    for mono, coeff in poly.terms:
        bits = [f"({coeff.real:.12g},{coeff.imag:.12g})"]
        for v, a, b in mono:
            name = names[v] if names else f"x{v}"
            if a:
                bits.append(f"sin({name})" + (f"^{a}" if a > 1 else ""))
            if b:
                bits.append(f"cos({name})" + (f"^{b}" if b > 1 else ""))
        parts.append("*".join(bits))
    return " + ".join(parts)
