"""Shared helpers for the test suite: seeded random generators."""

import numpy as np

from pqdd import Gate, PQC, ParamTable, TrigPoly
from pqdd.params import AngleExpr

ONE_QUBIT_CONST = ["x", "y", "z", "h", "s", "sdg", "t", "tdg"]
TWO_QUBIT = ["cx", "cz", "swap"]
ROTATIONS = ["rx", "ry", "rz"]


def rand_poly(rng, syms, max_terms=5, max_cos=2):
    """Random canonical trigonometric polynomial over the given symbols."""
    p = TrigPoly.zero()
    for _ in range(rng.integers(1, max_terms + 1)):
        t = TrigPoly.const(complex(rng.normal(), rng.normal()))
        for s in syms:
            if rng.uniform() < 0.5:
                continue
            if rng.uniform() < 0.5:
                t = t * TrigPoly.sin(s)
            for _ in range(rng.integers(0, max_cos + 1)):
                t = t * TrigPoly.cos(s)
        p = p + t
    return p


def rand_circuit(rng, n_qubits, n_gates, n_params, rot_prob=0.4):
    """Random circuit; every declared parameter is used at least once."""
    table = ParamTable()
    syms = [table.declare(f"t{i}") for i in range(n_params)]
    gates = []
    unused = list(syms)
    for i in range(n_gates):
        force_param = unused and (n_gates - i <= len(unused))
        if force_param or (syms and rng.uniform() < rot_prob):
            kind = str(rng.choice(ROTATIONS))
            q = int(rng.integers(0, n_qubits))
            sym = unused.pop(0) if unused else syms[rng.integers(0, len(syms))]
            gates.append(Gate(kind, (q,), AngleExpr.from_symbol(sym)))
        elif n_qubits >= 2 and rng.uniform() < 0.4:
            kind = str(rng.choice(TWO_QUBIT))
            a, b = rng.choice(n_qubits, size=2, replace=False)
            gates.append(Gate(kind, (int(a), int(b))))
        else:
            kind = str(rng.choice(ONE_QUBIT_CONST))
            gates.append(Gate(kind, (int(rng.integers(0, n_qubits)),)))
    return PQC(n_qubits, table, tuple(gates))


def rand_assignment(rng, table):
    """Full-angle values for every declared parameter."""
    return {s: float(rng.uniform(0.0, 2.0 * np.pi)) for s in table}
