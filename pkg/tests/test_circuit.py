"""Circuit text format, gate lowering, adjoints and parameter profiles."""

from fractions import Fraction

import numpy as np
import pytest

from pqdd import (Gate, ParamTable, ParseError, StddManager, TensorIndex,
                  adjoint_gate, lower_gate, pair_compatible, param_profile,
                  parse_pqc, print_pqc)
from pqdd.circuit import (ANGLE_KINDS, GATE_KINDS, matrix_polys,
                          parse_angle, render_angle)
from pqdd.oracle import gate_matrix
from pqdd.params import AngleExpr
from pqdd.stdd import EQ_IDENTICAL, IN, OUT
from pqdd.trigpoly import expand_half_angle


FIG2_TEXT = """\
qubits 2;
param phi, theta;
rz(phi) 0;
cx 0 1;
x 0;
rz(theta) 0;
"""

FIG3_TEXT = """\
qubits 2;
param phi, theta;
cx 0 1;
x 0;
rz(theta - phi) 0;
"""


def rand_gate(rng, kind, n_qubits, table):
    qubits = tuple(int(q) for q in
                   rng.choice(n_qubits, size=2 if kind in ("cx", "cz", "swap")
                              else 1, replace=False))
    angle = None
    if kind in ANGLE_KINDS:
        sym = table.lookup("t0")
        angle = AngleExpr.from_symbol(sym)
    return Gate(kind, qubits, angle)


def gate_as_matrix(g, assignment=None):
    """Dense matrix of the lowered diagram at the given full angles."""
    mgr = StddManager()
    D = lower_gate(mgr, g)
    k = len(g.qubits)
    out = [TensorIndex(OUT, q) for q in g.qubits]
    inn = [TensorIndex(IN, q) for q in g.qubits]
    indices = sorted(out + inn, key=mgr.order.key)
    vals = {}
    if assignment:
        vals = {s.id: v / 2 for s, v in assignment.items()}
    arr = mgr.evaluate(D, vals, indices)
    pos = {x: p for p, x in enumerate(indices)}
    perm = [pos[x] for x in out] + [pos[x] for x in inn]
    return arr.transpose(perm).reshape(2 ** k, 2 ** k)


# -- parsing ------------------------------------------------------------


def test_parse_fig_texts():
    c = parse_pqc(FIG2_TEXT)
    assert c.n_qubits == 2
    assert c.params.names() == ["phi", "theta"]
    assert [g.kind for g in c.gates] == ["rz", "cx", "x", "rz"]
    assert c.gates[1].qubits == (0, 1)
    c3 = parse_pqc(FIG3_TEXT)
    last = c3.gates[-1]
    assert last.kind == "rz"
    assert render_angle(last.angle) == "-phi + theta"


def test_parse_minimal():
    c = parse_pqc("qubits 1; x 0;")
    assert c.n_qubits == 1 and len(c.params) == 0
    assert c.gates == (Gate("x", (0,)),)


def test_parse_comments_and_multiline():
    c = parse_pqc("# header\nqubits 2;  # two qubits\ncx \n 0 1;\n")
    assert c.gates[0] == Gate("cx", (0, 1))


def test_parse_angle_forms():
    table = ParamTable()
    a = table.declare("a")
    b = table.declare("b")
    e = parse_angle("2*a - b + pi/2 - 1/3", table)
    assert dict(e.coeffs) == {a: 2, b: -1}
    assert e.const_pi == Fraction(1, 2)
    assert e.const_rat == Fraction(-1, 3)
    assert parse_angle("3*pi/4", table).const_pi == Fraction(3, 4)


@pytest.mark.parametrize("text,fragment", [
    ("x 0;", "qubits statement"),
    ("qubits 2; rz(theta*theta) 0;", "non-linear"),
    ("qubits 2; param t; rz(t) 0", "missing ';'"),
    ("qubits 2; frob 0;", "unknown gate"),
    ("qubits 2; x 5;", "out of range"),
    ("qubits 2; rz(theta) 0;", "undeclared"),
    ("qubits 2; param t; param t; x 0;", "declared twice"),
    ("qubits 2; cx 0;", "expects 2"),
    ("qubits 2; cx 1 1;", "distinct"),
    ("qubits 2; x(pi) 0;", "no angle"),
    ("qubits 2; rz 0;", "requires an angle"),
    ("qubits 0; x 0;", ">= 1"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_pqc(text)


def test_parse_error_reports_line():
    with pytest.raises(ParseError) as exc:
        parse_pqc("qubits 2;\nx 0;\nfrob 1;\n")
    assert exc.value.line == 3


def test_print_parse_roundtrip():
    for text in (FIG2_TEXT, FIG3_TEXT,
                 "qubits 3; param a, b; rx(2*a - b + pi/4) 2; swap 0 2;"):
        c = parse_pqc(text)
        again = parse_pqc(print_pqc(c))
        assert again.n_qubits == c.n_qubits
        assert again.params.names() == c.params.names()
        assert again.gates == c.gates


# -- lowering fidelity --------------------------------------------------


def test_lower_all_kinds_match_matrices():
    rng = np.random.default_rng(40)
    table = ParamTable()
    t0 = table.declare("t0")
    for kind in GATE_KINDS:
        for _ in range(10):
            g = rand_gate(rng, kind, 3, table)
            assignment = {t0: rng.uniform(0, 2 * np.pi)}
            got = gate_as_matrix(g, assignment)
            want = gate_matrix(g, assignment)
            assert np.allclose(got, want, atol=1e-12), kind


def test_lower_rz_difference_is_expansion():
    c = parse_pqc(FIG3_TEXT)
    g = c.gates[-1]
    cpoly, spoly = expand_half_angle(g.angle)
    mat = matrix_polys(g)
    assert mat[0][0] == cpoly - spoly.scale(1j)
    assert mat[1][1] == cpoly + spoly.scale(1j)
    assert mat[0][1].is_zero and mat[1][0].is_zero


def test_cx_control_is_first_qubit():
    got = gate_as_matrix(Gate("cx", (0, 1)))
    want = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert np.allclose(got, want)


# -- adjoints -----------------------------------------------------------


def test_adjoint_examples():
    table = ParamTable()
    th = table.declare("th")
    ph = table.declare("ph")
    g = Gate("rz", (0,), AngleExpr.from_symbol(th) - AngleExpr.from_symbol(ph))
    adj = adjoint_gate(g)
    assert render_angle(adj.angle) == "-th + ph"
    assert adjoint_gate(Gate("h", (0,))) == Gate("h", (0,))
    assert adjoint_gate(Gate("s", (0,))) == Gate("sdg", (0,))
    assert adjoint_gate(Gate("tdg", (0,))) == Gate("t", (0,))


def test_adjoint_involution():
    rng = np.random.default_rng(41)
    table = ParamTable()
    table.declare("t0")
    for kind in GATE_KINDS:
        g = rand_gate(rng, kind, 2, table)
        gg = adjoint_gate(adjoint_gate(g))
        assert np.allclose(gate_as_matrix(gg, _unit_assignment(table)),
                           gate_as_matrix(g, _unit_assignment(table)))


def _unit_assignment(table):
    return {s: 1.0 for s in table}


def test_adjoint_unitarity():
    """adjoint(g) contracted with g gives the identity diagram exactly."""
    rng = np.random.default_rng(42)
    table = ParamTable()
    table.declare("t0")
    for kind in GATE_KINDS:
        g = rand_gate(rng, kind, 2, table)
        mgr = StddManager()
        bonds = [TensorIndex(IN, q, 0) for q in g.qubits]
        G = lower_gate(mgr, g, out_indices=[TensorIndex(OUT, q) for q in g.qubits],
                       in_indices=bonds)
        H = lower_gate(mgr, adjoint_gate(g), out_indices=bonds,
                       in_indices=[TensorIndex(IN, q, 1) for q in g.qubits])
        got = mgr.contract(G, H, bonds)
        ident = mgr.identity(len(g.qubits),
                             out_indices=[TensorIndex(OUT, q) for q in g.qubits],
                             in_indices=[TensorIndex(IN, q, 1) for q in g.qubits])
        assert mgr.equal(got, ident) == EQ_IDENTICAL, kind


# -- parameter profiles -------------------------------------------------


def test_param_profile_positions():
    p = param_profile(parse_pqc(FIG2_TEXT))
    assert dict(p.positions) == {"phi": (0,), "theta": (3,)}
    assert p.name_sequence() == ("phi", "theta")
    assert p.each_parameter_occurs_once and p.single_symbol_gates


def test_fig_pair_not_compatible():
    # The rewritten circuit folds both parameters into one gate, so the
    # alternation strategy's per-parameter schedule does not apply.
    assert not pair_compatible(parse_pqc(FIG2_TEXT), parse_pqc(FIG3_TEXT))


def test_pair_compatible_cases():
    twice = parse_pqc("qubits 1; param t; rz(t) 0; x 0; rz(t) 0;")
    assert not param_profile(twice).each_parameter_occurs_once
    assert not pair_compatible(twice, twice)
    c = parse_pqc("qubits 2; param a, b; ry(a) 0; cx 0 1; rz(b) 1;")
    assert pair_compatible(c, c)
    swapped = parse_pqc("qubits 2; param a, b; ry(b) 0; cx 0 1; rz(a) 1;")
    assert not pair_compatible(c, swapped)
