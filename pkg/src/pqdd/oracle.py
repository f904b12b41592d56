"""Dense brute-force simulator and benchmark-instance factory.

The simulator multiplies out textbook gate matrices with a standard
tensor embedding and is the numeric ground truth the diagram engine is
tested against.  The factory builds ansatz-style circuit pairs: an
original, an exactly-equivalent rewrite, and error-injected variants.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .circuit import CONST_MATRICES, Gate, PQC, TWO_QUBIT_KINDS, print_pqc
from .params import AngleExpr, ParamSymbol, ParamTable

if os.environ.get("PQDD_PURE") == "1":
    _gate_c = None
else:
    try:
        from . import _gate_c  # type: ignore[attr-defined]
    except ImportError:
        _gate_c = None

MAX_SIM_QUBITS = 12


class TooManyQubitsError(ValueError):
    pass


def gate_matrix(g: Gate, assignment: dict[ParamSymbol, float]) -> np.ndarray:
    """Numeric unitary of one gate; rotation angles are full angles."""
    if g.kind in CONST_MATRICES:
        return np.array(CONST_MATRICES[g.kind], dtype=complex)
    th = g.angle.evaluate(assignment)
    c, s = np.cos(th / 2.0), np.sin(th / 2.0)
    if g.kind == "rz":
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]])
    if g.kind == "ry":
        return np.array([[c, -s], [s, c]])
    if g.kind == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if g.kind == "p":
        return np.array([[1, 0], [0, np.exp(1j * th)]])
    raise ValueError(f"unknown gate kind {g.kind!r}")


_T_PHASE = complex(2 ** -0.5, 2 ** -0.5)

_DIAG_GATES = {
    "z": (1.0, -1.0),
    "s": (1.0, 1j),
    "sdg": (1.0, -1j),
    "t": (1.0, _T_PHASE),
    "tdg": (1.0, _T_PHASE.conjugate()),
}


def _rows(U: np.ndarray, q: int):
    """The two row slices selected by the value of qubit q (q = MSB at 0)."""
    view = U.reshape(2 ** q, 2, -1)
    return view[:, 0, :], view[:, 1, :]


def _apply_real(u0, u1, o0, o1, t, a, b, c, d):
    """(o0, o1) <- (a*u0 + b*u1, c*u0 + d*u1) with real scalars.

    Operates on float views of the complex slices; ``t`` is scratch.
    """
    f0, f1 = u0.view(np.float64), u1.view(np.float64)
    g0, g1 = o0.view(np.float64), o1.view(np.float64)
    t = t.reshape(f1.shape)
    np.multiply(f0, a, out=g0)
    np.multiply(f1, b, out=t)
    g0 += t
    np.multiply(f0, c, out=g1)
    np.multiply(f1, d, out=t)
    g1 += t


def _apply_complex(u0, u1, o0, o1, t, m00, m01, m10, m11):
    t = t.reshape(u1.shape)
    np.multiply(u0, m00, out=o0)
    np.multiply(u1, m01, out=t)
    o0 += t
    np.multiply(u0, m10, out=o1)
    np.multiply(u1, m11, out=t)
    o1 += t


def _rz_diag(g: Gate, assignment) -> tuple[complex, complex]:
    th = g.angle.evaluate(assignment)
    d0 = complex(np.cos(th / 2), -np.sin(th / 2))
    return d0, d0.conjugate()


def _angle_diag(g: Gate, assignment) -> tuple[complex, complex]:
    if g.kind == "rz":
        return _rz_diag(g, assignment)
    # p(theta) = diag(1, e^{i*theta})
    return 1.0 + 0.0j, complex(np.exp(1j * g.angle.evaluate(assignment)))


def _simulate_compiled(c: PQC, assignment, U: np.ndarray) -> np.ndarray:
    for g in c.gates:
        kind = g.kind
        if kind in ("rz", "p") or kind in _DIAG_GATES:
            d0, d1 = (_angle_diag(g, assignment) if kind in ("rz", "p")
                      else _DIAG_GATES[kind])
            _gate_c.apply_diag(U, g.qubits[0], d0, d1)
        elif kind == "cx":
            _gate_c.apply_cx(U, g.qubits[0], g.qubits[1])
        elif kind == "cz":
            _gate_c.apply_cz(U, g.qubits[0], g.qubits[1])
        elif kind == "swap":
            _gate_c.apply_swap(U, g.qubits[0], g.qubits[1])
        else:
            M = gate_matrix(g, assignment)
            _gate_c.apply_single(U, g.qubits[0], M[0, 0], M[0, 1],
                                 M[1, 0], M[1, 1])
    return U


def simulate(c: PQC, assignment: dict[ParamSymbol, float] | None = None) -> np.ndarray:
    """2^n x 2^n unitary of the whole circuit at a parameter assignment.

    Qubit 0 is the most significant bit of the row/column index.  Gate
    application is specialised per kind (in-place diagonal scaling, real
    rotations on float views) so large instances stay affordable; a
    compiled kernel takes over when available.
    """
    n = c.n_qubits
    if n > MAX_SIM_QUBITS:
        raise TooManyQubitsError(f"{n} qubits exceeds the dense limit "
                                 f"of {MAX_SIM_QUBITS}")
    assignment = assignment or {}
    dim = 2 ** n
    U = np.eye(dim, dtype=complex)
    if _gate_c is not None:
        return _simulate_compiled(c, assignment, U)
    out = np.empty_like(U)
    ctmp = np.empty(dim * dim // 2, dtype=complex).reshape(max(dim // 2, 1), -1)
    ftmp = ctmp.view(np.float64)
    for g in c.gates:
        kind = g.kind
        if kind in _DIAG_GATES or kind in ("rz", "p"):
            if kind in ("rz", "p"):
                d0, d1 = _angle_diag(g, assignment)
            else:
                d0, d1 = _DIAG_GATES[kind]
            u0, u1 = _rows(U, g.qubits[0])
            if d0 != 1.0:
                u0 *= d0
            if d1 != 1.0:
                u1 *= d1
        elif kind in ("ry", "h", "x", "y", "rx"):
            u0, u1 = _rows(U, g.qubits[0])
            o0, o1 = _rows(out, g.qubits[0])
            r = 2 ** -0.5
            if kind == "ry":
                th = g.angle.evaluate(assignment)
                cv, sv = np.cos(th / 2), np.sin(th / 2)
                _apply_real(u0, u1, o0, o1, ftmp, cv, -sv, sv, cv)
            elif kind == "h":
                _apply_real(u0, u1, o0, o1, ftmp, r, r, r, -r)
            elif kind == "x":
                _apply_real(u0, u1, o0, o1, ftmp, 0.0, 1.0, 1.0, 0.0)
            elif kind == "y":
                _apply_complex(u0, u1, o0, o1, ctmp, 0.0, -1j, 1j, 0.0)
            else:  # rx
                th = g.angle.evaluate(assignment)
                cv, isv = np.cos(th / 2), -1j * np.sin(th / 2)
                _apply_complex(u0, u1, o0, o1, ctmp, cv, isv, isv, cv)
            U, out = out, U
        elif kind == "cz":
            a, b = sorted(g.qubits)
            view = U.reshape(2 ** a, 2, 2 ** (b - a - 1), 2, -1)
            view[:, 1, :, 1, :] *= -1
        elif kind == "cx":
            ctrl, tgt = g.qubits
            a, b = sorted(g.qubits)
            view = U.reshape(2 ** a, 2, 2 ** (b - a - 1), 2, -1)
            on = view[:, 1] if ctrl < tgt else view[:, :, :, 1]
            lo = on[:, :, 0, :] if ctrl < tgt else on[:, 0, :, :]
            hi = on[:, :, 1, :] if ctrl < tgt else on[:, 1, :, :]
            t = ctmp.reshape(-1)[:lo.size].reshape(lo.shape)
            t[...] = lo
            lo[...] = hi
            hi[...] = t
        else:  # generic two-qubit gate (swap)
            M = gate_matrix(g, assignment)
            T = M.reshape(2, 2, 2, 2)  # (r..., c...), first qubit = MSB
            W = U.reshape((2,) * n + (dim,))
            W = np.tensordot(T, W, axes=([2, 3], list(g.qubits)))
            W = np.moveaxis(W, [0, 1], list(g.qubits))
            U = np.ascontiguousarray(W.reshape(dim, dim))
    return U


# ---------------------------------------------------------------------------
# benchmark factory


FAMILIES = ("RealAmplitudes", "EfficientSU2", "TwoLocal")


@dataclass(frozen=True)
class BenchSpec:
    family: str
    n_qubits: int
    reps: int
    entangler: str = "linear"
    seed: int = 0

    @property
    def name(self) -> str:
        return f"{self.family}_{self.n_qubits}_{self.reps}"

    def param_count(self) -> int:
        per_layer = 2 if self.family == "EfficientSU2" else 1
        return per_layer * self.n_qubits * (self.reps + 1)


def _entangler_pairs(n: int, entangler: str):
    if entangler == "linear":
        return [(q, q + 1) for q in range(n - 1)]
    if entangler == "full":
        return [(i, j) for i in range(n) for j in range(i + 1, n)]
    raise ValueError(f"unknown entangler {entangler!r}")


def generate(spec: BenchSpec) -> PQC:
    """Deterministic ansatz instance; see ``generate_text`` for the header.

    RealAmplitudes: reps x (RY layer + entangler) + final RY layer.
    EfficientSU2:   reps x (RY layer + RZ layer + entangler) + final RY+RZ.
    TwoLocal:       like RealAmplitudes but the rotation kind per layer and
                    the entangling gate are drawn from the seed.
    """
    if spec.family not in FAMILIES:
        raise ValueError(f"unknown family {spec.family!r}")
    if spec.reps < 1:
        raise ValueError("reps must be >= 1")
    n = spec.n_qubits
    rng = np.random.default_rng(spec.seed)
    ent_gate = "cx"
    if spec.family == "TwoLocal":
        ent_gate = rng.choice(["cx", "cz"])
    table = ParamTable()
    gates: list[Gate] = []
    counter = 0

    def rot_layer(kind):
        nonlocal counter
        for q in range(n):
            sym = table.declare(f"p{counter}")
            counter += 1
            gates.append(Gate(kind, (q,), AngleExpr.from_symbol(sym)))

    def layer_kinds():
        if spec.family == "EfficientSU2":
            return ("ry", "rz")
        if spec.family == "TwoLocal":
            return (rng.choice(["ry", "rz", "rx"]),)
        return ("ry",)

    for _ in range(spec.reps):
        for kind in layer_kinds():
            rot_layer(kind)
        for a, b in _entangler_pairs(n, spec.entangler):
            gates.append(Gate(ent_gate, (a, b)))
    for kind in layer_kinds():
        rot_layer(kind)
    return PQC(n, table, tuple(gates))


def generate_text(spec: BenchSpec) -> str:
    c = generate(spec)
    header = (f"# {spec.name} entangler={spec.entangler} seed={spec.seed}\n"
              f"# {len(c.params)} parameters, {len(c.gates)} gates, "
              f"{spec.reps} repetition(s)\n")
    return header + print_pqc(c)


# ---------------------------------------------------------------------------
# equivalence-preserving rewriter


_INSERT_POOL = ("x", "y", "z", "h", "s", "t", "cx", "cz", "swap")


def rule_cx_to_cz(gates: list[Gate], i: int) -> None:
    """Replace ``cx a b`` at position i with ``h b; cz a b; h b``."""
    a, b = gates[i].qubits
    gates[i:i + 1] = [Gate("h", (b,)), Gate("cz", (a, b)), Gate("h", (b,))]


def rule_insert_pair(gates: list[Gate], pos: int, g: Gate) -> None:
    """Insert ``g; adjoint(g)`` at the given position."""
    from .circuit import adjoint_gate

    gates[pos:pos] = [g, adjoint_gate(g)]


def rule_commute_disjoint(gates: list[Gate], i: int) -> None:
    """Swap adjacent gates acting on disjoint qubit sets."""
    assert not set(gates[i].qubits) & set(gates[i + 1].qubits)
    gates[i], gates[i + 1] = gates[i + 1], gates[i]


def rule_rz_conjugate(gates: list[Gate], i: int) -> None:
    """Replace ``rz(a) q`` at position i with ``x q; rz(-a) q; x q``."""
    q = gates[i].qubits
    gates[i:i + 1] = [Gate("x", q), Gate("rz", q, -gates[i].angle),
                      Gate("x", q)]


def rewrite_equivalent(c: PQC, seed: int = 0, n_rewrites: int = 10) -> PQC:
    """Apply sound rewrite rules; the unitary is preserved exactly.

    Rules: cx a b -> h b; cz a b; h b  |  insert (g; adjoint(g)) pairs  |
    swap adjacent gates on disjoint qubits  |  rz(a) -> x; rz(-a); x.
    """
    rng = np.random.default_rng(seed)
    gates = list(c.gates)
    for _ in range(n_rewrites):
        rule = rng.integers(0, 4)
        if rule == 0:
            cands = [i for i, g in enumerate(gates) if g.kind == "cx"]
            if not cands:
                continue
            rule_cx_to_cz(gates, int(rng.choice(cands)))
        elif rule == 1:
            kind = str(rng.choice(_INSERT_POOL))
            if kind in TWO_QUBIT_KINDS:
                if c.n_qubits < 2:
                    continue
                qs = tuple(int(q) for q in
                           rng.choice(c.n_qubits, size=2, replace=False))
            else:
                qs = (int(rng.integers(0, c.n_qubits)),)
            rule_insert_pair(gates, int(rng.integers(0, len(gates) + 1)),
                             Gate(kind, qs))
        elif rule == 2:
            cands = [i for i in range(len(gates) - 1)
                     if not set(gates[i].qubits) & set(gates[i + 1].qubits)]
            if not cands:
                continue
            rule_commute_disjoint(gates, int(rng.choice(cands)))
        else:
            cands = [i for i, g in enumerate(gates) if g.kind == "rz"]
            if not cands:
                continue
            rule_rz_conjugate(gates, int(rng.choice(cands)))
    return PQC(c.n_qubits, c.params, tuple(gates))


# ---------------------------------------------------------------------------
# error injection


def inject_errors(c: PQC, rate: float, kind: str = "x",
                  seed: int = 0) -> PQC:
    """Insert X (bit-flip) or Z (phase-flip) gates after random gates.

    Each gate is followed by an inserted error with probability ``rate``
    on a uniformly chosen qubit it touches.  At least one insertion is
    guaranteed (the seed is bumped until one occurs), so the result is
    non-equivalent to the input except for measure-zero coincidences.
    """
    if not 0 < rate <= 1:
        raise ValueError("rate must be in (0, 1]")
    if kind not in ("x", "z"):
        raise ValueError("error kind must be 'x' or 'z'")
    attempt = 0
    while True:
        rng = np.random.default_rng(seed + attempt)
        gates: list[Gate] = []
        inserted = 0
        for g in c.gates:
            gates.append(g)
            if rng.uniform() < rate:
                q = int(rng.choice(g.qubits))
                gates.append(Gate(kind, (q,)))
                inserted += 1
        if inserted:
            return PQC(c.n_qubits, c.params, tuple(gates))
        attempt += 1
