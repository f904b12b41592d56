"""Parameterised-circuit IR: text format, gate lowering and adjoints.

The text format is line oriented with ``;``-terminated statements and
``#`` comments::

    qubits 2;
    param phi, theta;
    rz(phi) 0;
    cx 0 1;
    x 0;
    rz(theta) 0;

Gate angles are integer-linear combinations of declared parameters plus
rational constants and rational multiples of ``pi``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .params import AngleExpr, ParamSymbol, ParamTable
from .stdd import IN, OUT, STDD, StddManager, TensorIndex
from .trigpoly import TrigPoly, expand_half_angle

ROTATION_KINDS = ("rx", "ry", "rz")
# Gates taking an angle argument: the axis rotations plus the phase gate
# p(theta) = diag(1, e^{i*theta}), whose determinant depends on the angle.
ANGLE_KINDS = ROTATION_KINDS + ("p",)
SINGLE_QUBIT_KINDS = ("x", "y", "z", "h", "s", "sdg", "t", "tdg") + ANGLE_KINDS
TWO_QUBIT_KINDS = ("cx", "cz", "swap")
GATE_KINDS = SINGLE_QUBIT_KINDS + TWO_QUBIT_KINDS

_SQRT2_INV = 2 ** -0.5
_T_PHASE = complex(_SQRT2_INV, _SQRT2_INV)

# Constant gate matrices; first listed qubit is the most significant bit
# (the control, for cx).
CONST_MATRICES = {
    "x": [[0, 1], [1, 0]],
    "y": [[0, -1j], [1j, 0]],
    "z": [[1, 0], [0, -1]],
    "h": [[_SQRT2_INV, _SQRT2_INV], [_SQRT2_INV, -_SQRT2_INV]],
    "s": [[1, 0], [0, 1j]],
    "sdg": [[1, 0], [0, -1j]],
    "t": [[1, 0], [0, _T_PHASE]],
    "tdg": [[1, 0], [0, _T_PHASE.conjugate()]],
    "cx": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    "cz": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]],
    "swap": [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
}

_SELF_ADJOINT = {"x", "y", "z", "h", "cx", "cz", "swap"}
_ADJOINT_SWAPS = {"s": "sdg", "sdg": "s", "t": "tdg", "tdg": "t"}


class ParseError(ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: AngleExpr | None = None

    def __repr__(self):
        ang = f"({render_angle(self.angle)})" if self.angle is not None else ""
        return f"{self.kind}{ang} {' '.join(map(str, self.qubits))}"


@dataclass(frozen=True)
class PQC:
    n_qubits: int
    params: ParamTable
    gates: tuple[Gate, ...]


def adjoint_gate(g: Gate) -> Gate:
    """Gate implementing the conjugate transpose."""
    if g.kind in _SELF_ADJOINT:
        return g
    if g.kind in _ADJOINT_SWAPS:
        return Gate(_ADJOINT_SWAPS[g.kind], g.qubits)
    return Gate(g.kind, g.qubits, -g.angle)


# ---------------------------------------------------------------------------
# parsing


_GATE_RE = re.compile(r"^([a-z]+)\s*(?:\((.*)\))?\s*((?:\d+\s*)+)$")


def parse_pqc(text: str) -> PQC:
    n_qubits = None
    table = ParamTable()
    gates: list[Gate] = []
    for stmt, line in _statements(text):
        head = stmt.split(None, 1)[0]
        if head == "qubits":
            if n_qubits is not None:
                raise ParseError("duplicate qubits statement", line)
            if gates or len(table):
                raise ParseError("qubits must be the first statement", line)
            try:
                n_qubits = int(stmt.split(None, 1)[1])
            except (IndexError, ValueError):
                raise ParseError("malformed qubits statement", line) from None
            if n_qubits < 1:
                raise ParseError("qubit count must be >= 1", line)
        elif head == "param":
            rest = stmt[len("param"):]
            for name in [p.strip() for p in rest.split(",")]:
                if not re.fullmatch(r"[A-Za-z_]\w*", name or "") or name == "pi":
                    raise ParseError(f"bad parameter name {name!r}", line)
                try:
                    table.declare(name)
                except ValueError as exc:
                    raise ParseError(str(exc), line) from None
        else:
            if n_qubits is None:
                raise ParseError("qubits statement must come first", line)
            gates.append(_parse_gate(stmt, line, n_qubits, table))
    if n_qubits is None:
        raise ParseError("missing qubits statement")
    return PQC(n_qubits, table, tuple(gates))


def _statements(text: str):
    pending = ""
    pending_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        for ch in line:
            if ch == ";":
                stmt = pending.strip()
                if stmt:
                    yield stmt, pending_line
                pending, pending_line = "", None
            else:
                if pending_line is None and not ch.isspace():
                    pending_line = lineno
                pending += ch
        pending += " "
    if pending.strip():
        raise ParseError("unterminated statement (missing ';')", pending_line)


def _parse_gate(stmt: str, line, n_qubits: int, table: ParamTable) -> Gate:
    m = _GATE_RE.match(stmt)
    if not m:
        raise ParseError(f"malformed gate statement {stmt!r}", line)
    kind, angle_text, qubit_text = m.groups()
    if kind not in GATE_KINDS:
        raise ParseError(f"unknown gate {kind!r}", line)
    qubits = tuple(int(q) for q in qubit_text.split())
    arity = 2 if kind in TWO_QUBIT_KINDS else 1
    if len(qubits) != arity:
        raise ParseError(f"{kind} expects {arity} qubit(s)", line)
    if len(set(qubits)) != len(qubits):
        raise ParseError("qubit arguments must be distinct", line)
    for q in qubits:
        if not 0 <= q < n_qubits:
            raise ParseError(f"qubit {q} out of range", line)
    angle = None
    if kind in ANGLE_KINDS:
        if angle_text is None:
            raise ParseError(f"{kind} requires an angle argument", line)
        angle = parse_angle(angle_text, table, line)
    elif angle_text is not None:
        raise ParseError(f"{kind} takes no angle argument", line)
    return Gate(kind, qubits, angle)


_NUM_RE = re.compile(r"^(\d+)(?:/(\d+))?$")
_NUM_PI_RE = re.compile(r"^(?:(\d+)(?:/(\d+))?\s*\*\s*)?pi(?:\s*/\s*(\d+))?$")
_COEFF_NAME_RE = re.compile(r"^(?:(\d+)\s*\*\s*)?([A-Za-z_]\w*)$")


def parse_angle(text: str, table: ParamTable, line=None) -> AngleExpr:
    """Angle grammar: ``term (+- term)*`` over declared parameters."""
    coeffs: dict[ParamSymbol, int] = {}
    const_rat, const_pi = Fraction(0), Fraction(0)
    text = text.strip()
    if not text:
        raise ParseError("empty angle expression", line)
    for sign, term in _iter_terms(text, line):
        m = _NUM_RE.match(term)
        if m:
            const_rat += sign * Fraction(int(m.group(1)), int(m.group(2) or 1))
            continue
        m = _NUM_PI_RE.match(term)
        if m:
            num = Fraction(int(m.group(1) or 1), int(m.group(2) or 1))
            const_pi += sign * num / int(m.group(3) or 1)
            continue
        m = _COEFF_NAME_RE.match(term)
        if m and m.group(2) != "pi":
            name = m.group(2)
            if name not in table:
                raise ParseError(f"undeclared parameter {name!r}", line)
            sym = table.lookup(name)
            coeffs[sym] = coeffs.get(sym, 0) + sign * int(m.group(1) or 1)
            continue
        raise ParseError(f"unsupported or non-linear angle term {term!r}", line)
    return AngleExpr.build(coeffs, const_rat, const_pi)


def _iter_terms(text, line):
    """Yield (sign, term_text) for a sum of signed terms."""
    pos, first = 0, True
    while pos < len(text):
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        sign = 1
        if text[pos] in "+-":
            sign = -1 if text[pos] == "-" else 1
            pos += 1
        elif not first:
            raise ParseError(f"expected '+' or '-' in angle {text!r}", line)
        nxt = len(text)
        for i in range(pos, len(text)):
            if text[i] in "+-":
                nxt = i
                break
        term = text[pos:nxt].strip()
        if not term:
            raise ParseError(f"dangling sign in angle {text!r}", line)
        yield sign, term
        pos, first = nxt, False


# ---------------------------------------------------------------------------
# printing


def render_angle(a: AngleExpr) -> str:
    parts = []
    for sym, n in a.coeffs:
        mag = abs(n)
        body = sym.name if mag == 1 else f"{mag}*{sym.name}"
        parts.append(("-" if n < 0 else "+", body))
    for frac, is_pi in ((a.const_rat, False), (a.const_pi, True)):
        if frac == 0:
            continue
        num, den = abs(frac.numerator), frac.denominator
        if is_pi:
            body = "pi" if num == 1 else f"{num}*pi"
            if den != 1:
                body += f"/{den}"
        else:
            body = str(num) if den == 1 else f"{num}/{den}"
        parts.append(("-" if frac < 0 else "+", body))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def print_pqc(c: PQC) -> str:
    lines = [f"qubits {c.n_qubits};"]
    if len(c.params):
        lines.append("param " + ", ".join(c.params.names()) + ";")
    for g in c.gates:
        ang = f"({render_angle(g.angle)})" if g.angle is not None else ""
        lines.append(f"{g.kind}{ang} {' '.join(map(str, g.qubits))};")
    return "\n".join(lines) + "\n"


def rebind_params(c: PQC, table: ParamTable) -> PQC:
    """Re-express all angles over a shared parameter table (by name)."""
    gates = []
    for g in c.gates:
        if g.angle is None:
            gates.append(g)
        else:
            coeffs = {table.lookup(s.name): n for s, n in g.angle.coeffs}
            angle = AngleExpr.build(coeffs, g.angle.const_rat, g.angle.const_pi)
            gates.append(Gate(g.kind, g.qubits, angle))
    return PQC(c.n_qubits, table, tuple(gates))


# ---------------------------------------------------------------------------
# lowering to S-TDDs


def matrix_polys(g: Gate) -> list[list[TrigPoly]]:
    """Gate matrix with trigonometric-polynomial entries."""
    if g.kind in CONST_MATRICES:
        return [[TrigPoly.const(v) for v in row] for row in CONST_MATRICES[g.kind]]
    if g.kind == "p":
        # diag(1, e^{i*theta}); doubling the angle keeps the entries in the
        # shared half-angle variables.
        c2, s2 = expand_half_angle(g.angle + g.angle)
        zero = TrigPoly.zero()
        return [[TrigPoly.one(), zero], [zero, c2 + s2.scale(1j)]]
    c, s = expand_half_angle(g.angle)
    i_s = s.scale(1j)
    if g.kind == "rz":
        zero = TrigPoly.zero()
        return [[c - i_s, zero], [zero, c + i_s]]
    if g.kind == "ry":
        return [[c, -s], [s, c]]
    if g.kind == "rx":
        return [[c, -i_s], [-i_s, c]]
    raise ValueError(f"unknown gate kind {g.kind!r}")


def lower_gate(mgr: StddManager, g: Gate,
               out_indices=None, in_indices=None) -> STDD:
    """S-TDD of the gate tensor over its out/in indices.

    Index defaults place the gate on its own qubits at generation 0; the
    checker passes explicit indices when splicing into a running product.
    """
    if out_indices is None:
        out_indices = [TensorIndex(OUT, q, 0) for q in g.qubits]
    if in_indices is None:
        in_indices = [TensorIndex(IN, q, 0) for q in g.qubits]
    mat = matrix_polys(g)
    k = len(g.qubits)
    slots = []  # (index, side, position): bit position 0 is the MSB
    for i in range(k):
        slots.append((out_indices[i], 0, i))
        slots.append((in_indices[i], 1, i))
    slots.sort(key=lambda t: mgr.order.key(t[0]))

    def build(pos: int, r: int, c: int) -> STDD:
        if pos == len(slots):
            return mgr.leaf_poly(mat[r][c])
        idx, side, qpos = slots[pos]
        shift = k - 1 - qpos
        lo = build(pos + 1, r, c)
        if side == 0:
            hi = build(pos + 1, r | (1 << shift), c)
        else:
            hi = build(pos + 1, r, c | (1 << shift))
        return mgr.make_node(idx, lo, hi)

    return build(0, 0, 0)


# ---------------------------------------------------------------------------
# parameter occurrence analysis


@dataclass(frozen=True)
class ParamProfile:
    """Positions of parameterised gates and per-gate symbol usage."""

    positions: tuple[tuple[str, tuple[int, ...]], ...]
    sequence: tuple[tuple[str, ...], ...]  # symbols per parameterised gate

    @property
    def each_parameter_occurs_once(self) -> bool:
        return all(len(pos) == 1 for _, pos in self.positions)

    @property
    def single_symbol_gates(self) -> bool:
        return all(len(syms) == 1 for syms in self.sequence)

    def name_sequence(self) -> tuple[str, ...]:
        return tuple(syms[0] for syms in self.sequence)


def param_profile(c: PQC) -> ParamProfile:
    positions = {s.name: [] for s in c.params}
    sequence = []
    for i, g in enumerate(c.gates):
        if g.angle is None or g.angle.is_constant():
            continue
        syms = tuple(s.name for s in g.angle.symbols())
        sequence.append(syms)
        for name in syms:
            positions[name].append(i)
    return ParamProfile(tuple((n, tuple(p)) for n, p in positions.items()),
                        tuple(sequence))


def pair_compatible(c1: PQC, c2: PQC) -> bool:
    """True when the early-abort alternation strategy is sound: every
    parameter occurs exactly once per circuit, one symbol per gate, and
    the parameter order agrees."""
    p1, p2 = param_profile(c1), param_profile(c2)
    if not (p1.single_symbol_gates and p2.single_symbol_gates):
        return False
    if not (p1.each_parameter_occurs_once and p2.each_parameter_occurs_once):
        return False
    return p1.name_sequence() == p2.name_sequence()
