"""Equivalence decision procedures for parameterised circuits.

Two strategies are provided: ``check_construct`` builds both circuit
diagrams under one shared manager and compares them; ``check_alternate``
keeps a running product ``D = U_pre . V_pre^\\dagger`` near the identity
by consuming gates of the first circuit on the output side and adjoints
of the second on the input side, aborting early when a parameter that
can no longer cancel is still present.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

import numpy as np

from .circuit import PQC, adjoint_gate, lower_gate, pair_compatible, rebind_params
from .params import ParamSymbol, ParamTable
from .stdd import (EQ_IDENTICAL, EQ_SAME_STRUCTURE, IN, OUT, STDD,
                   StddManager, StddStats, TensorIndex)
from .trdd import TrRef, TrddManager, refs_equal
from .trigpoly import EPS


class Verdict(enum.Enum):
    Equivalent = "equivalent"
    EquivalentUpToGlobalPhase = "equivalent-up-to-global-phase"
    NotEquivalent = "not-equivalent"


class CheckTimeout(Exception):
    """Wall-clock limit exceeded; distinct from any Verdict."""


class CheckError(ValueError):
    """Structural mismatch between the two inputs (qubits, parameters)."""


@dataclass
class CheckReport:
    verdict: Verdict
    phase: TrRef | None = None  # global-phase weight for up-to-phase verdicts
    aborted_at_param: ParamSymbol | None = None
    stats: StddStats = field(default_factory=StddStats)
    wall_time: float = 0.0
    # (gates of c1, gates of c2) consumed by the alternation strategy when
    # it stopped; None for the construction strategy.
    gates_consumed: tuple[int, int] | None = None

    def phase_is_constant(self) -> bool:
        return self.phase is not None and self.phase.node.label is None

    def phase_poly(self):
        """The phase weight as a polynomial (None without a phase).

        Conversion is structural, so a throwaway manager serves as scratch.
        """
        if self.phase is None:
            return None
        return TrddManager().to_poly(self.phase)

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "aborted_at_param": (self.aborted_at_param.name
                                 if self.aborted_at_param else None),
            "phase_is_constant": self.phase_is_constant(),
            "node_max": self.stats.node_max,
            "node_final": self.stats.node_final,
            "node_tdd": self.stats.nodes_tdd_total,
            "node_trdd": self.stats.nodes_trdd_total,
            "time_s": round(self.wall_time, 6),
        }


def _shared_setup(c1: PQC, c2: PQC):
    """Validate the pair and rebind both circuits over one parameter table."""
    if c1.n_qubits != c2.n_qubits:
        raise CheckError("qubit counts differ "
                         f"({c1.n_qubits} vs {c2.n_qubits})")
    if set(c1.params.names()) != set(c2.params.names()):
        raise CheckError("parameter name sets differ")
    table = ParamTable()
    for name in c1.params.names():
        table.declare(name)
    return rebind_params(c1, table), rebind_params(c2, table), table


class _Deadline:
    def __init__(self, timeout_s):
        self.t0 = time.monotonic()
        self.timeout_s = timeout_s

    def check(self):
        if self.timeout_s is not None and self.elapsed() > self.timeout_s:
            raise CheckTimeout(f"exceeded {self.timeout_s} s")

    def elapsed(self):
        return time.monotonic() - self.t0


class RunningProduct:
    """Open-wire running product diagram with generation-bumped indices.

    The output side exposes one index per qubit at its current generation;
    applying a gate on either side replaces the touched wire indices, the
    superseded index becoming the contraction bond.
    """

    def __init__(self, mgr: StddManager, n_qubits: int):
        self.mgr = mgr
        self.n = n_qubits
        self.out_gen = [0] * n_qubits
        self.in_gen = [0] * n_qubits
        self.D = mgr.identity(n_qubits)

    def out_index(self, q):
        return TensorIndex(OUT, q, self.out_gen[q])

    def in_index(self, q):
        return TensorIndex(IN, q, self.in_gen[q])

    def apply_left(self, gate):
        """D <- G . D (gate acts on the output side)."""
        bonds = [self.out_index(q) for q in gate.qubits]
        for q in gate.qubits:
            self.out_gen[q] += 1
        G = lower_gate(self.mgr, gate,
                       out_indices=[self.out_index(q) for q in gate.qubits],
                       in_indices=bonds)
        self.D = self.mgr.contract(G, self.D, bonds)

    def apply_right_adjoint(self, gate):
        """D <- D . H^dagger (adjoint of the gate acts on the input side)."""
        adj = adjoint_gate(gate)
        bonds = [self.in_index(q) for q in gate.qubits]
        for q in gate.qubits:
            self.in_gen[q] += 1
        H = lower_gate(self.mgr, adj,
                       out_indices=bonds,
                       in_indices=[self.in_index(q) for q in gate.qubits])
        self.D = self.mgr.contract(self.D, H, bonds)

    def final_indices(self):
        out = [self.out_index(q) for q in range(self.n)]
        inn = [self.in_index(q) for q in range(self.n)]
        return out, inn

    def relabel_to_gen0(self) -> STDD:
        out, inn = self.final_indices()
        mapping = {}
        for q in range(self.n):
            mapping[out[q]] = TensorIndex(OUT, q, 0)
            mapping[inn[q]] = TensorIndex(IN, q, 0)
        return self.mgr.relabel(self.D, mapping)


def _lower_circuit(mgr: StddManager, c: PQC, deadline: _Deadline) -> STDD:
    rp = RunningProduct(mgr, c.n_qubits)
    for g in c.gates:
        rp.apply_left(g)
        mgr.note_live(rp.D)
        deadline.check()
    return rp.relabel_to_gen0()


def _collect_stats(mgr: StddManager, finals) -> StddStats:
    final = max((mgr.qubit_nodes(F) for F in finals), default=0)
    return StddStats(node_max=mgr.node_max, node_final=final,
                     nodes_tdd_total=mgr.nodes_created,
                     nodes_trdd_total=mgr.weights.nodes_created)


def _constant_ratio(wm: TrddManager, w1: TrRef, w2: TrRef) -> TrRef | None:
    """TrRef of the constant c with w1 = c*w2, or None if no such c."""
    p1, p2 = wm.to_poly(w1), wm.to_poly(w2)
    if p2.is_zero:
        return None
    c = p1.leading_coeff() / p2.leading_coeff()
    if (p1 - p2.scale(c)).approx_equal(type(p1).zero(), tol=1e-9):
        return wm.constant(c)
    return None


def _identity_phase(mgr: StddManager, D: STDD,
                    out_indices, in_indices) -> TrRef | None:
    """The weight φ with ``D = φ * Identity``, or None.

    Local normalisation only extracts monomial factors, so scaling the
    identity by a multi-term polynomial leaves that polynomial spread over
    the edge weights instead of the root; this walk matches the identity
    structure directly and multiplies the per-entry weights back together.
    """
    wm = mgr.weights
    n = len(out_indices)
    memo: dict = {}

    def walk(node, q):
        # φ such that the sub-diagram at ``node`` is φ * identity over
        # qubits q..n-1, or None when the structure does not match.
        if q == n:
            return wm.one if node.index is None else None
        key = (node.id, q)
        if key in memo:
            return memo[key]
        res = None
        if node.index == out_indices[q]:
            lo, hi = node.low, node.high
            if (lo.index == in_indices[q] and hi.index == in_indices[q]
                    and abs(lo.whigh.weight) <= EPS
                    and abs(hi.wlow.weight) <= EPS):
                pl = walk(lo.low, q + 1)
                ph = walk(hi.high, q + 1)
                if pl is not None and ph is not None:
                    e0 = wm.mul(node.wlow, wm.mul(lo.wlow, pl))
                    e1 = wm.mul(node.whigh, wm.mul(hi.whigh, ph))
                    if refs_equal(e0, e1, tol=1e-9):
                        res = e0
        memo[key] = res
        return res

    body = walk(D.root, 0)
    if body is None:
        return None
    return wm.mul(D.weight, body)


def _product_phase(mgr: StddManager, c1: PQC, c2: PQC,
                   deadline: _Deadline) -> TrRef | None:
    """φ with U1 = φ * U2, via the running product U1 · U2†."""
    rp = RunningProduct(mgr, c1.n_qubits)
    for g in c1.gates:
        rp.apply_left(g)
        deadline.check()
    for g in c2.gates:
        rp.apply_right_adjoint(g)
        deadline.check()
    out, inn = rp.final_indices()
    return _identity_phase(mgr, rp.D, out, inn)


def _modulus_identical(wm: TrddManager, w1: TrRef, w2: TrRef) -> bool:
    """|w1|^2 == |w2|^2 as canonical polynomials."""
    p1 = wm.to_poly(wm.mul(w1, wm.conj(w1)))
    p2 = wm.to_poly(wm.mul(w2, wm.conj(w2)))
    return (p1 - p2).approx_equal(type(p1).zero(), tol=1e-9)


def check_construct(c1: PQC, c2: PQC, timeout_s: float | None = 1200.0,
                    extract_scalar: bool = True) -> CheckReport:
    """Build both reduced diagrams under one manager and compare."""
    deadline = _Deadline(timeout_s)
    c1, c2, _table = _shared_setup(c1, c2)
    mgr = StddManager(extract_scalar=extract_scalar)
    D1 = _lower_circuit(mgr, c1, deadline)
    D2 = _lower_circuit(mgr, c2, deadline)
    eq = mgr.equal(D1, D2)
    wm = mgr.weights
    if eq == EQ_IDENTICAL:
        verdict, phase = Verdict.Equivalent, wm.one
    elif eq == EQ_SAME_STRUCTURE and _modulus_identical(wm, D1.weight, D2.weight):
        verdict = Verdict.EquivalentUpToGlobalPhase
        phase = _constant_ratio(wm, D1.weight, D2.weight)
    else:
        verdict, phase = Verdict.NotEquivalent, None
        # A parameter-dependent global phase is a multi-term polynomial
        # factor, which local normalisation cannot extract, so the two
        # diagrams differ structurally.  A cheap numeric filter decides
        # whether the symbolic running-product test is worth running; the
        # verdict itself is always symbolic.
        if confirm_by_sampling(c1, c2, k=4, seed=0):
            phi = _product_phase(mgr, c1, c2, deadline)
            if phi is not None and _modulus_identical(wm, phi, wm.one):
                if refs_equal(phi, wm.one, tol=1e-9):
                    verdict, phase = Verdict.Equivalent, wm.one
                else:
                    verdict, phase = Verdict.EquivalentUpToGlobalPhase, phi
    return CheckReport(verdict, phase, None, _collect_stats(mgr, (D1, D2)),
                       deadline.elapsed())


def _param_positions(c: PQC):
    """Gate positions of parameterised gates, in circuit order."""
    return [i for i, g in enumerate(c.gates)
            if g.angle is not None and not g.angle.is_constant()]


def check_alternate(c1: PQC, c2: PQC, timeout_s: float | None = 1200.0,
                    extract_scalar: bool = True) -> CheckReport:
    """Alternate toward the identity with per-parameter early abort."""
    deadline = _Deadline(timeout_s)
    compatible = pair_compatible(c1, c2)
    c1, c2, table = _shared_setup(c1, c2)
    mgr = StddManager(extract_scalar=extract_scalar)
    rp = RunningProduct(mgr, c1.n_qubits)

    if compatible:
        pos1, pos2 = _param_positions(c1), _param_positions(c2)
        barriers = [(p1, p2, c1.gates[p1].angle.symbols()[0])
                    for p1, p2 in zip(pos1, pos2)]
    else:
        barriers = []
    barriers.append((len(c1.gates) - 1, len(c2.gates) - 1, None))

    i1 = i2 = 0
    n1, n2 = len(c1.gates), len(c2.gates)
    for stop1, stop2, sym in barriers:
        # Consume both circuits up to (and including) the barrier gates,
        # advancing the side with the larger remaining-work ratio.
        end1, end2 = stop1 + 1, stop2 + 1
        while i1 < end1 or i2 < end2:
            r1 = (end1 - i1) / max(n1, 1)
            r2 = (end2 - i2) / max(n2, 1)
            if i2 >= end2 or (i1 < end1 and r1 >= r2):
                rp.apply_left(c1.gates[i1])
                i1 += 1
            else:
                rp.apply_right_adjoint(c2.gates[i2])
                i2 += 1
            mgr.note_live(rp.D)
            deadline.check()
        if (sym is not None and (i1 < n1 or i2 < n2)
                and mgr.depends_on(rp.D, sym, ignore_root_weight=True)):
            # No remaining gate mentions this parameter, so the dependence
            # can never cancel: the circuits differ at some assignment.
            # (With nothing left to consume this is no longer an early
            # abort; the final identity check below decides instead.)
            return CheckReport(Verdict.NotEquivalent, None, sym,
                               _collect_stats(mgr, (rp.D,)),
                               deadline.elapsed(), (i1, i2))

    out, inn = rp.final_indices()
    stats = _collect_stats(mgr, (rp.D,))
    wm = mgr.weights
    w = _identity_phase(mgr, rp.D, out, inn)
    if w is not None:
        if refs_equal(w, wm.one, tol=1e-9):
            return CheckReport(Verdict.Equivalent, wm.one, None, stats,
                               deadline.elapsed(), (n1, n2))
        if _modulus_identical(wm, w, wm.one):
            return CheckReport(Verdict.EquivalentUpToGlobalPhase, w, None,
                               stats, deadline.elapsed(), (n1, n2))
    return CheckReport(Verdict.NotEquivalent, None, None, stats,
                       deadline.elapsed(), (n1, n2))


def check(c1: PQC, c2: PQC, strategy: str = "auto",
          timeout_s: float | None = 1200.0) -> CheckReport:
    if strategy == "auto":
        strategy = "alternate" if pair_compatible(c1, c2) else "construct"
    if strategy == "construct":
        return check_construct(c1, c2, timeout_s)
    if strategy == "alternate":
        return check_alternate(c1, c2, timeout_s)
    raise ValueError(f"unknown strategy {strategy!r}")


def confirm_by_sampling(c1: PQC, c2: PQC, k: int = 20,
                        seed: int | None = None, tol: float = 1e-8) -> bool:
    """Numeric cross-check at k uniform parameter assignments.

    Compares the dense unitaries up to a global phase (normalising by the
    first entry of significant magnitude).  Never overrides the symbolic
    verdict; disagreement is an internal error at the call site.
    """
    from .oracle import simulate

    if k < 1:
        raise ValueError("k must be >= 1")
    if set(c1.params.names()) != set(c2.params.names()):
        raise CheckError("parameter name sets differ")
    rng = np.random.default_rng(seed)
    for _ in range(k):
        values = {name: rng.uniform(0.0, 2.0 * np.pi)
                  for name in c1.params.names()}
        U1 = simulate(c1, {c1.params.lookup(n): v for n, v in values.items()})
        U2 = simulate(c2, {c2.params.lookup(n): v for n, v in values.items()})
        if not _phase_close(U1, U2, tol):
            return False
    return True


def _phase_close(U1: np.ndarray, U2: np.ndarray, tol: float) -> bool:
    a, b = U1.ravel(), U2.ravel()
    scale = max(np.abs(a).max(), np.abs(b).max(), 1.0)
    idx = next((i for i in range(a.size) if abs(a[i]) > tol * scale), None)
    if idx is None:
        return bool(np.abs(b).max() <= tol * scale)
    if abs(b[idx]) <= tol * scale:
        return False
    ratio = a[idx] / b[idx]
    if abs(abs(ratio) - 1.0) > 1e-6:
        return False
    return bool(np.allclose(a, ratio * b, atol=tol * scale))
