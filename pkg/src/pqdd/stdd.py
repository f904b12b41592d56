"""S-TDD: tensor decision diagrams with trigonometric-polynomial weights.

Tensor indices are boolean; edge weights live in a TrDD manager.  One
``StddManager`` owns the unique table, operation caches and statistics
counters for a single checking job and must not be shared across
threads while mutating.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import trdd
from .params import ParamSymbol
from .trigpoly import EPS, TrigPoly, format_poly
from .trdd import TrRef, TrddManager, refs_equal

OUT, IN = "out", "in"


@dataclass(frozen=True)
class TensorIndex:
    """One boolean tensor index.

    ``role`` is "out" (circuit output side) or "in" (circuit input side);
    ``gen`` is bumped each time a gate application replaces the open wire
    index, so the superseded index becomes the contraction bond.
    """

    role: str
    qubit: int
    gen: int = 0

    def __repr__(self):
        return f"{self.role}{self.qubit}.{self.gen}"


class IndexOrder:
    """Interleaved per-qubit total order: q0-out < q0-in < q1-out < ...

    Newer out-generations sort below older ones (the fresh output index
    must precede the bond it replaces); in-generations sort upward.
    """

    def key(self, idx: TensorIndex):
        if idx.role == OUT:
            return (idx.qubit, 0, -idx.gen)
        return (idx.qubit, 1, idx.gen)

    def before(self, a: TensorIndex, b: TensorIndex) -> bool:
        return self.key(a) < self.key(b)


class OrderMismatchError(ValueError):
    """Operands built under different index orders."""


class SNode:
    __slots__ = ("index", "low", "high", "wlow", "whigh", "id")

    def __init__(self, index, low, high, wlow, whigh, node_id):
        self.index = index
        self.low = low
        self.high = high
        self.wlow = wlow
        self.whigh = whigh
        self.id = node_id

    def __repr__(self):
        if self.index is None:
            return "SNode(terminal)"
        return f"SNode({self.index!r})"


@dataclass(frozen=True)
class STDD:
    """Reduced, normalised diagram: ``weight * poly(root)``."""

    weight: TrRef
    root: SNode
    manager: "StddManager"

    @property
    def is_zero(self) -> bool:
        return abs(self.weight.weight) <= EPS and self.root.index is None


EQ_IDENTICAL = "identical"
EQ_SAME_STRUCTURE = "same-structure-different-weight"
EQ_DIFFERENT = "different"


class StddManager:
    def __init__(self, weights: TrddManager | None = None,
                 order: IndexOrder | None = None, extract_scalar: bool = True):
        self.weights = weights if weights is not None else TrddManager()
        self.order = order if order is not None else IndexOrder()
        self.extract_scalar = extract_scalar
        self.terminal = SNode(None, None, None, None, None, 0)
        self._unique = {}
        self._next_id = 1
        self.nodes_created = 1
        self._add_cache = {}
        self._contract_cache = {}
        self._norm_cache = {}
        self.node_max = 0

    def clear_caches(self):
        self._add_cache.clear()
        self._contract_cache.clear()
        self.weights.clear_caches()

    # -- construction ----------------------------------------------------

    def leaf(self, w: TrRef) -> STDD:
        if abs(w.weight) <= EPS:
            return STDD(self.weights.zero, self.terminal, self)
        return STDD(w, self.terminal, self)

    def zero(self) -> STDD:
        return STDD(self.weights.zero, self.terminal, self)

    def leaf_poly(self, poly: TrigPoly) -> STDD:
        return self.leaf(self.weights.from_poly(poly))

    def _key_of(self, idx: TensorIndex):
        return self.order.key(idx)

    def _wk(self, w: TrRef):
        c = self.weights.canon_weight(w.weight)
        return (w.node.id, c.real, c.imag)

    def make_node(self, idx: TensorIndex, low: STDD, high: STDD) -> STDD:
        """Reduced, locally-normalised node for xbar*low + x*high."""
        for child in (low, high):
            if child.root.index is not None:
                assert self._key_of(child.root.index) > self._key_of(idx), \
                    "child index must come after the node index"
        wl, wh = low.weight, high.weight
        if abs(wl.weight) <= EPS and abs(wh.weight) <= EPS:
            return self.zero()
        # RR1: both successors and both weights equal.
        if low.root is high.root and refs_equal(wl, wh):
            return STDD(wl, low.root, self)
        h, wl_n, wh_n = self._loc_norm(wl, wh)
        key = (self._key_of(idx), low.root.id, high.root.id, self._wk(wl_n), self._wk(wh_n))
        node = self._unique.get(key)
        if node is None:
            node = SNode(idx, low.root, high.root, wl_n, wh_n, self._next_id)
            self._next_id += 1
            self.nodes_created += 1
            self._unique[key] = node
        return STDD(h, node, self)

    def _loc_norm(self, wl: TrRef, wh: TrRef):
        """Common-factor extraction on a pair of edge weights.

        Extracts the greatest common monomial and (optionally) the leading
        coefficient, operating directly on the weight diagrams; the result
        agrees with ``common_factor`` on the expanded polynomials.
        """
        key = (self._wk(wl), self._wk(wh), self.extract_scalar)
        hit = self._norm_cache.get(key)
        if hit is not None:
            return hit
        wm = self.weights
        if wl.node.label is None and wh.node.label is None:
            # Constant pair: gcd monomial is 1, scalar from the first
            # nonzero weight.
            if self.extract_scalar:
                c = wl.weight if abs(wl.weight) > EPS else wh.weight
                res = (wm.constant(c), wm.constant(wl.weight / c),
                       wm.constant(wh.weight / c))
            else:
                res = (wm.one, wl, wh)
        else:
            zl, zh = abs(wl.weight) <= EPS, abs(wh.weight) <= EPS
            if zl or zh:
                m = wm.node_gcd((wl if zh else wh).node)
            else:
                gl = {u: (a, b) for u, a, b in wm.node_gcd(wl.node)}
                gh = {u: (a, b) for u, a, b in wm.node_gcd(wh.node)}
                both = {u: (min(gl[u][0], gh[u][0]), min(gl[u][1], gh[u][1]))
                        for u in gl.keys() & gh.keys()}
                m = tuple((u, a, b) for u, (a, b) in sorted(both.items())
                          if (a, b) != (0, 0))
            if self.extract_scalar:
                # Dividing by a common monomial preserves the term order,
                # so the quotient's leading coefficient is the dividend's.
                c = wm.lead_coeff(wh if zl else wl)
                if abs(c - 1.0) <= EPS:
                    c = 1.0 + 0.0j
            else:
                c = 1.0 + 0.0j
            h = wm.mono_ref(m, c) if (m or c != 1.0 + 0.0j) else wm.one
            ql, qh = wm.div_mono(wl, m), wm.div_mono(wh, m)
            if c != 1.0 + 0.0j:
                ql = TrRef(ql.weight / c, ql.node)
                qh = TrRef(qh.weight / c, qh.node)
            res = (h, ql, qh)
        self._norm_cache[key] = res
        return res

    # -- operations ------------------------------------------------------

    def _check(self, other: STDD):
        if other.manager is not self:
            raise OrderMismatchError("operands belong to different managers")

    def _split(self, F: STDD, idx: TensorIndex):
        r = F.root
        if r.index is not None and r.index == idx:
            wm = self.weights
            return (STDD(wm.mul(F.weight, r.wlow), r.low, self),
                    STDD(wm.mul(F.weight, r.whigh), r.high, self))
        return F, F

    def add(self, F: STDD, G: STDD) -> STDD:
        self._check(F)
        self._check(G)
        if F.is_zero:
            return G
        if G.is_zero:
            return F
        if F.root.index is None and G.root.index is None:
            return self.leaf(self.weights.add(F.weight, G.weight))
        ka = (F.root.id, self._wk(F.weight))
        kb = (G.root.id, self._wk(G.weight))
        key = (ka, kb) if ka <= kb else (kb, ka)
        hit = self._add_cache.get(key)
        if hit is not None:
            return hit
        idx = self._top_index(F, G)
        F0, F1 = self._split(F, idx)
        G0, G1 = self._split(G, idx)
        res = self.make_node(idx, self.add(F0, G0), self.add(F1, G1))
        self._add_cache[key] = res
        return res

    def _top_index(self, F: STDD, G: STDD) -> TensorIndex:
        cands = [r.index for r in (F.root, G.root) if r.index is not None]
        return min(cands, key=self._key_of)

    def contract(self, F: STDD, G: STDD, shared) -> STDD:
        """Sum over the shared boolean indices of the pointwise product."""
        self._check(F)
        self._check(G)
        shared = tuple(sorted(shared, key=self._key_of))
        return self._contract(F, G, shared)

    def _contract(self, F: STDD, G: STDD, shared) -> STDD:
        if F.is_zero or G.is_zero:
            return self.zero()
        wm = self.weights
        if F.root.index is None and G.root.index is None:
            w = wm.mul(F.weight, G.weight)
            if shared:
                w = wm.mul(w, wm.constant(2.0 ** len(shared)))
            return self.leaf(w)
        ka = (F.root.id, self._wk(F.weight))
        kb = (G.root.id, self._wk(G.weight))
        key = (ka, kb, shared) if ka <= kb else (kb, ka, shared)
        hit = self._contract_cache.get(key)
        if hit is not None:
            return hit
        cands = [r.index for r in (F.root, G.root) if r.index is not None]
        idx = min(cands + list(shared), key=self._key_of)
        F0, F1 = self._split(F, idx)
        G0, G1 = self._split(G, idx)
        if shared and idx == shared[0]:
            rest = shared[1:]
            res = self.add(self._contract(F0, G0, rest),
                           self._contract(F1, G1, rest))
        else:
            res = self.make_node(idx, self._contract(F0, G0, shared),
                                 self._contract(F1, G1, shared))
        self._contract_cache[key] = res
        return res

    # -- identity ---------------------------------------------------------

    def identity(self, n: int, out_indices=None, in_indices=None) -> STDD:
        """Diagram of the 2^n identity over interleaved out/in indices."""
        assert n >= 1
        if out_indices is None:
            out_indices = [TensorIndex(OUT, q, 0) for q in range(n)]
        if in_indices is None:
            in_indices = [TensorIndex(IN, q, 0) for q in range(n)]
        pairs = sorted(zip(out_indices, in_indices),
                       key=lambda p: self._key_of(p[0]))
        acc = self.leaf(self.weights.one)
        for out_i, in_i in reversed(pairs):
            lo = self.make_node(in_i, acc, self.zero())
            hi = self.make_node(in_i, self.zero(), acc)
            acc = self.make_node(out_i, lo, hi)
        return acc

    # -- comparison / queries ---------------------------------------------

    def equal(self, F: STDD, G: STDD) -> str:
        self._check(F)
        self._check(G)
        if F.root is not G.root:
            return EQ_DIFFERENT
        if refs_equal(F.weight, G.weight):
            return EQ_IDENTICAL
        return EQ_SAME_STRUCTURE

    def depends_on(self, F: STDD, sym: ParamSymbol,
                   ignore_root_weight: bool = False) -> bool:
        wm = self.weights
        if not ignore_root_weight and wm.depends_on(F.weight, sym):
            return True
        seen = set()

        def walk(node):
            if node.index is None or node.id in seen:
                return False
            seen.add(node.id)
            if wm.depends_on(node.wlow, sym) or wm.depends_on(node.whigh, sym):
                return True
            return walk(node.low) or walk(node.high)

        return walk(F.root)

    def evaluate(self, F: STDD, values: dict[int, float], indices) -> np.ndarray:
        """Dense array over ``indices`` (must be order-sorted, covering all
        indices present in the diagram); ``values`` maps var id to the
        half-angle value."""
        wm = self.weights
        indices = list(indices)
        memo = {}

        def walk(node, pos):
            if pos == len(indices):
                assert node.index is None, "diagram has indices beyond the given list"
                return np.ones((), dtype=complex)
            key = (node.id, pos)
            if key in memo:
                return memo[key]
            idx = indices[pos]
            if node.index is not None and node.index == idx:
                a0 = wm.evaluate(node.wlow, values) * walk(node.low, pos + 1)
                a1 = wm.evaluate(node.whigh, values) * walk(node.high, pos + 1)
                res = np.stack([a0, a1])
            else:
                sub = walk(node, pos + 1)
                res = np.stack([sub, sub])
            memo[key] = res
            return res

        return wm.evaluate(F.weight, values) * walk(F.root, 0)

    def reachable_nodes(self, F: STDD) -> int:
        """Non-terminal nodes reachable from the root."""
        seen = set()

        def walk(node):
            if node.index is None or node.id in seen:
                return
            seen.add(node.id)
            walk(node.low)
            walk(node.high)

        walk(F.root)
        return len(seen)

    def qubit_nodes(self, F: STDD) -> int:
        """Per-qubit-level node count.

        Out-index nodes and their same-qubit in-index successors act as one
        matrix-level decision vertex (a node with four outgoing matrix
        entries), so an in-index node reached from an out-index node of the
        same qubit is absorbed into it and not counted separately.  On the
        identity over n qubits this yields n; ``reachable_nodes`` reports the
        raw boolean-index count (3n there).
        """
        seen = set()
        counted = set()

        def walk(node, out_qubit):
            if node.index is None:
                return
            absorbed = node.index.role == IN and node.index.qubit == out_qubit
            key = (node.id, absorbed)
            if key in seen:
                return
            seen.add(key)
            if not absorbed:
                counted.add(node.id)
            next_q = node.index.qubit if node.index.role == OUT else out_qubit
            walk(node.low, next_q)
            walk(node.high, next_q)

        walk(F.root, None)
        return len(counted)

    def note_live(self, F: STDD):
        self.node_max = max(self.node_max, self.qubit_nodes(F))

    def relabel(self, F: STDD, mapping: dict[TensorIndex, TensorIndex]) -> STDD:
        """Rebuild with renamed indices; the mapping must preserve order."""
        memo = {}

        def walk(node):
            if node.index is None:
                return self.terminal
            if node.id in memo:
                return memo[node.id]
            idx = mapping.get(node.index, node.index)
            low = STDD(node.wlow, walk(node.low), self)
            high = STDD(node.whigh, walk(node.high), self)
            res = self.make_node(idx, low, high)
            # Weights are already normalised, so make_node returns factor 1.
            assert refs_equal(res.weight, self.weights.one), \
                "relabel must not change normalisation"
            memo[node.id] = res.root
            return res.root

        return STDD(F.weight, walk(F.root), self)

    def validate(self, F: STDD):
        """Assert reduction and local-normalisation invariants."""
        seen = set()

        def walk(node):
            if node.index is None or node.id in seen:
                return
            seen.add(node.id)
            wl, wh = node.wlow, node.whigh
            assert abs(wl.weight) > EPS or abs(wh.weight) > EPS, \
                "dead node with two zero weights"
            assert not (node.low is node.high and refs_equal(wl, wh)), \
                "RR1-reducible node survived"
            h, _, _ = self._loc_norm(wl, wh)
            assert refs_equal(h, self.weights.one), "node not locally normalised"
            for child in (node.low, node.high):
                if child.index is not None:
                    assert self._key_of(child.index) > self._key_of(node.index)
                walk(child)

        walk(F.root)

    def serialize(self, F: STDD) -> str:
        wm = self.weights
        lines = [f"root w=[{format_poly(wm.to_poly(F.weight))}] node{F.root.id}"]
        seen = set()

        def walk(node):
            if node.id in seen:
                return
            seen.add(node.id)
            if node.index is None:
                lines.append(f"node{node.id} terminal")
                return
            lines.append(
                f"node{node.id} {node.index!r} "
                f"low=[{format_poly(wm.to_poly(node.wlow))}] node{node.low.id} "
                f"high=[{format_poly(wm.to_poly(node.whigh))}] node{node.high.id}")
            walk(node.low)
            walk(node.high)

        walk(F.root)
        return "\n".join(lines)


@dataclass
class StddStats:
    """Node statistics for one checking job."""

    node_max: int = 0
    node_final: int = 0
    nodes_tdd_total: int = 0
    nodes_trdd_total: int = 0
