"""Hash-consed decision diagrams for trigonometric polynomials.

Non-terminal nodes carry a sin(x)/cos(x) label and a list of edges
annotated with the power of that label; weighted references pair a node
with the complex factor on its incoming edge.  Within one manager,
structurally equal diagrams are the same object, so canonical-form
equality is reference equality.
"""

from __future__ import annotations

import math

from . import _kernels as K
from .params import ParamSymbol
from .trigpoly import EPS, MissingParameterError, TrigPoly

SIN, COS = 0, 1

# Grid spacing for interning/cache keys: the float-canonicity compromise
# documented in the README.  Weights within one grid step are identified.
_KEY_DIGITS = 10
_KEY_STEP = 10.0 ** -_KEY_DIGITS


def _wkey(w: complex):
    return (round(w.real, _KEY_DIGITS), round(w.imag, _KEY_DIGITS))


class TrNode:
    """Interned diagram node; ``label`` is (var_id, SIN|COS), None at the
    terminal.  ``edges`` is a tuple of (degree, weight, child) with strictly
    ascending degrees and leftmost weight 1."""

    __slots__ = ("label", "edges", "id")

    def __init__(self, label, edges, node_id):
        self.label = label
        self.edges = edges
        self.id = node_id

    def __repr__(self):
        if self.label is None:
            return "TrNode(terminal)"
        v, fn = self.label
        return f"TrNode({'sin' if fn == SIN else 'cos'}(x{v}), {len(self.edges)} edges)"


class TrRef:
    """Weighted reference: the polynomial is ``weight * poly(node)``."""

    __slots__ = ("weight", "node")

    def __init__(self, weight, node):
        self.weight = complex(weight)
        self.node = node

    def __repr__(self):
        return f"TrRef({self.weight!r}, {self.node!r})"


def refs_equal(a: TrRef, b: TrRef, tol: float = EPS) -> bool:
    return a.node is b.node and abs(a.weight - b.weight) <= tol


class TrddManager:
    """Owns the unique table and operation caches for one checking job."""

    def __init__(self):
        self.terminal = TrNode(None, (), 0)
        self._unique = {}
        self._next_id = 1
        self.nodes_created = 1
        self._add_cache = {}
        self._mul_cache = {}
        self._conj_cache = {}
        self._to_poly_cache = {}
        self._from_poly_cache = {}
        self._gcd_cache = {}
        self._lead_cache = {}
        self._div_cache = {}
        self._wcanon_fast = {}
        self._wcanon: dict[tuple, complex] = {}
        self.zero = TrRef(0.0, self.terminal)
        self.one = TrRef(1.0, self.terminal)
        # When set, multiplication goes through the polynomial ring instead
        # of the recursive apply; used as a cross-check oracle in tests.
        self.mul_via_poly = False

    def clear_caches(self):
        self._add_cache.clear()
        self._mul_cache.clear()
        self._conj_cache.clear()

    # -- node construction ----------------------------------------------

    def constant(self, c: complex) -> TrRef:
        return TrRef(0.0 if abs(c) <= EPS else c, self.terminal)

    def canon_weight(self, w: complex) -> complex:
        """Snap ``w`` to the stored representative of its tolerance class.

        Plain rounding splits weights that differ by ~1e-16 but straddle a
        grid boundary; probing the neighbouring grid cells keeps such weights
        on the same representative, so interning stays canonical.
        """
        rep = self._wcanon_fast.get(w)
        if rep is not None:
            return rep
        rep = self._canon_weight_slow(w)
        self._wcanon_fast[w] = rep
        return rep

    def _canon_weight_slow(self, w: complex) -> complex:
        kr, ki = _wkey(w)
        best = None
        best_d = 2.0 * _KEY_STEP
        for dr in (0.0, -_KEY_STEP, _KEY_STEP):
            for di in (0.0, -_KEY_STEP, _KEY_STEP):
                rep = self._wcanon.get((round(kr + dr, _KEY_DIGITS),
                                        round(ki + di, _KEY_DIGITS)))
                if rep is not None:
                    d = abs(rep - w)
                    if d <= best_d:
                        best, best_d = rep, d
        if best is not None:
            return best
        self._wcanon[(kr, ki)] = w
        return w

    def _intern(self, label, edges) -> TrNode:
        edges = [(d, self.canon_weight(w), c) for d, w, c in edges]
        key = (label, tuple((d, _wkey(w), c.id) for d, w, c in edges))
        node = self._unique.get(key)
        if node is None:
            node = TrNode(label, tuple(edges), self._next_id)
            self._next_id += 1
            self.nodes_created += 1
            self._unique[key] = node
        return node

    def make_node(self, label, children) -> TrRef:
        """Normalised node from ``(degree, TrRef)`` children.

        Zero children are dropped; the weight of the lowest-degree edge is
        pulled onto the returned reference so the leftmost edge weight is 1.
        """
        live = [(d, r) for d, r in children if abs(r.weight) > EPS]
        if not live:
            return self.zero
        live.sort(key=lambda dr: dr[0])
        if len(live) == 1 and live[0][0] == 0:
            return live[0][1]
        w0 = live[0][1].weight
        edges = tuple((d, r.weight / w0, r.node) for d, r in live)
        return TrRef(w0, self._intern(label, edges))

    # -- polynomial conversion ------------------------------------------

    def from_poly(self, poly: TrigPoly) -> TrRef:
        ref = self._from_terms(poly.terms)
        return ref

    def _from_terms(self, terms) -> TrRef:
        if not terms:
            return self.zero
        if len(terms) == 1 and terms[0][0] == ():
            return self.constant(terms[0][1])
        cached = self._from_poly_cache.get(terms)
        if cached is not None:
            return cached
        label = _smallest_label(terms)
        var, fn = label
        groups: dict[int, list] = {}
        for mono, coeff in terms:
            d, rest = _strip_label(mono, var, fn)
            groups.setdefault(d, []).append((rest, coeff))
        children = [(d, self._from_terms(K.canonicalize(g, EPS)))
                    for d, g in sorted(groups.items())]
        ref = self.make_node(label, children)
        self._from_poly_cache[terms] = ref
        return ref

    def to_poly(self, ref: TrRef) -> TrigPoly:
        return TrigPoly(K.scale_terms(self._node_terms(ref.node), ref.weight, EPS))

    def _node_terms(self, node: TrNode):
        if node.label is None:
            return (((), 1.0 + 0.0j),)
        cached = self._to_poly_cache.get(node.id)
        if cached is not None:
            return cached
        var, fn = node.label
        acc = ()
        for d, w, child in node.edges:
            sub = K.scale_terms(self._node_terms(child), w, EPS)
            if d:
                mono = ((var, 1, 0),) if fn == SIN else ((var, 0, d),)
                sub = K.mul_terms((((mono), 1.0 + 0.0j),), sub, EPS)
            acc = K.add_terms(acc, sub, EPS)
        self._to_poly_cache[node.id] = acc
        return acc

    # -- ring operations -------------------------------------------------

    def add(self, a: TrRef, b: TrRef) -> TrRef:
        if abs(a.weight) <= EPS:
            return b
        if abs(b.weight) <= EPS:
            return a
        ka = (a.node.id, _wkey(a.weight))
        kb = (b.node.id, _wkey(b.weight))
        key = (ka, kb) if ka <= kb else (kb, ka)
        hit = self._add_cache.get(key)
        if hit is not None:
            return hit
        if a.node.label is None and b.node.label is None:
            res = self.constant(a.weight + b.weight)
        else:
            label = _min_label(a.node.label, b.node.label)
            parts: dict[int, TrRef] = {}
            for op in (a, b):
                for d, r in _decompose(op, label):
                    parts[d] = self.add(parts[d], r) if d in parts else r
            res = self.make_node(label, list(parts.items()))
        self._add_cache[key] = res
        return res

    def mul(self, a: TrRef, b: TrRef) -> TrRef:
        if abs(a.weight) <= EPS or abs(b.weight) <= EPS:
            return self.zero
        if self.mul_via_poly:
            return self.from_poly(self.to_poly(a) * self.to_poly(b))
        body = self._mul_nodes(a.node, b.node)
        return self._scaled(body, a.weight * b.weight)

    def _scaled(self, ref: TrRef, c: complex) -> TrRef:
        w = ref.weight * c
        return TrRef(0.0, self.terminal) if abs(w) <= EPS else TrRef(w, ref.node)

    def _mul_nodes(self, na: TrNode, nb: TrNode) -> TrRef:
        if na.label is None:
            return TrRef(1.0, nb)
        if nb.label is None:
            return TrRef(1.0, na)
        key = (na.id, nb.id) if na.id <= nb.id else (nb.id, na.id)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit
        label = _min_label(na.label, nb.label)
        da = _decompose(TrRef(1.0, na), label)
        db = _decompose(TrRef(1.0, nb), label)
        parts: dict[int, TrRef] = {}

        def accumulate(d, r):
            parts[d] = self.add(parts[d], r) if d in parts else r

        for d1, r1 in da:
            for d2, r2 in db:
                sub = self.mul(r1, r2)
                d = d1 + d2
                if label[1] == SIN and d >= 2:
                    # sin^2 = 1 - cos^2 re-enters two degrees down.
                    one_minus_cos_sq = self.make_node(
                        (label[0], COS),
                        [(0, self.one), (2, TrRef(-1.0, self.terminal))])
                    accumulate(d - 2, self.mul(sub, one_minus_cos_sq))
                else:
                    accumulate(d, sub)
        res = self.make_node(label, list(parts.items()))
        self._mul_cache[key] = res
        return res

    def conj(self, a: TrRef) -> TrRef:
        return TrRef(a.weight.conjugate(), self._conj_node(a.node))

    def _conj_node(self, node: TrNode) -> TrNode:
        if node.label is None:
            return node
        hit = self._conj_cache.get(node.id)
        if hit is not None:
            return hit
        edges = [(d, w.conjugate(), self._conj_node(c)) for d, w, c in node.edges]
        res = self._intern(node.label, edges)
        self._conj_cache[node.id] = res
        return res

    # -- monomial factor extraction ---------------------------------------
    # These operate directly on the diagram (memoised per node), avoiding
    # the polynomial round-trip that dominates local normalisation on
    # large weights.

    def node_gcd(self, node: TrNode) -> tuple:
        """Greatest monomial dividing every term, as ``((v, a, b), ...)``."""
        if node.label is None:
            return ()
        hit = self._gcd_cache.get(node.id)
        if hit is not None:
            return hit
        v, fn = node.label
        acc = None
        for d, _w, child in node.edges:
            sub = {u: (a, b) for u, a, b in self.node_gcd(child)}
            if d:
                a, b = sub.get(v, (0, 0))
                sub[v] = (a + d, b) if fn == SIN else (a, b + d)
            if acc is None:
                acc = sub
            else:
                acc = {u: (min(acc[u][0], sub[u][0]),
                           min(acc[u][1], sub[u][1]))
                       for u in acc.keys() & sub.keys()}
                acc = {u: e for u, e in acc.items() if e != (0, 0)}
            if not acc:
                break
        res = tuple((u, a, b) for u, (a, b) in sorted(acc.items()))
        self._gcd_cache[node.id] = res
        return res

    def lead_coeff(self, ref: TrRef) -> complex:
        """Coefficient of the first term in canonical order."""
        return ref.weight * self._node_lead(ref.node)

    def _node_lead(self, node: TrNode) -> complex:
        if node.label is None:
            return 1.0 + 0.0j
        hit = self._lead_cache.get(node.id)
        if hit is not None:
            return hit
        # The term order puts sin before cos and higher powers first, so
        # the leading term always follows the highest-degree edge.
        _d, w, child = node.edges[-1]
        res = w * self._node_lead(child)
        self._lead_cache[node.id] = res
        return res

    def mono_ref(self, mono: tuple, c: complex = 1.0) -> TrRef:
        """TrRef of ``c`` times the monomial."""
        node = self.terminal
        for v, a, b in reversed(mono):
            if b:
                node = self._intern((v, COS), ((b, 1.0 + 0.0j, node),))
            if a:
                node = self._intern((v, SIN), ((a, 1.0 + 0.0j, node),))
        return TrRef(c, node)

    def div_mono(self, ref: TrRef, mono: tuple) -> TrRef:
        """``ref`` divided by a monomial that divides every term."""
        if not mono or abs(ref.weight) <= EPS:
            return ref
        q = self._div_node(ref.node, mono)
        return self._scaled(q, ref.weight)

    def _div_node(self, node: TrNode, mono: tuple) -> TrRef:
        if not mono:
            return TrRef(1.0, node)
        key = (node.id, mono)
        hit = self._div_cache.get(key)
        if hit is not None:
            return hit
        v, fn = node.label
        v0, a0, b0 = mono[0]
        k, rest = 0, mono
        if v == v0:
            if fn == SIN:
                if a0:
                    k = a0
                    rest = (((v0, 0, b0),) + mono[1:]) if b0 else mono[1:]
            else:
                # Any sin factor was consumed higher up (each path meets a
                # given variable's sin label before its cos label).
                k = b0
                rest = mono[1:]
        children = [(d - k, self._scaled(self._div_node(c, rest), w))
                    for d, w, c in node.edges]
        res = self.make_node(node.label, children)
        self._div_cache[key] = res
        return res

    # -- queries ----------------------------------------------------------

    def depends_on(self, a: TrRef, sym: ParamSymbol) -> bool:
        seen = set()

        def walk(node):
            if node.label is None or node.id in seen:
                return False
            seen.add(node.id)
            if node.label[0] == sym.id:
                return True
            return any(walk(c) for _, _, c in node.edges)

        return abs(a.weight) > EPS and walk(a.node)

    def evaluate(self, a: TrRef, values: dict[int, float]) -> complex:
        memo = {}

        def walk(node):
            if node.label is None:
                return 1.0 + 0.0j
            if node.id in memo:
                return memo[node.id]
            var, fn = node.label
            if var not in values:
                raise MissingParameterError(var)
            base = math.sin(values[var]) if fn == SIN else math.cos(values[var])
            total = 0.0 + 0.0j
            for d, w, child in node.edges:
                total += w * base ** d * walk(child)
            memo[node.id] = total
            return total

        return a.weight * walk(a.node)

    def node_count(self, a: TrRef) -> int:
        """Distinct reachable nodes, terminal included."""
        seen = set()

        def walk(node):
            if node.id in seen:
                return
            seen.add(node.id)
            for _, _, c in node.edges:
                walk(c)

        walk(a.node)
        return len(seen)

    def serialize(self, a: TrRef) -> str:
        """Deterministic textual DAG dump for goldens and debugging."""
        lines = [f"root {a.weight.real:.10g}{a.weight.imag:+.10g}j node{a.node.id}"]
        seen = set()

        def walk(node):
            if node.id in seen:
                return
            seen.add(node.id)
            if node.label is None:
                lines.append(f"node{node.id} terminal")
                return
            v, fn = node.label
            desc = ",".join(f"{d}:{w.real:.10g}{w.imag:+.10g}j:node{c.id}"
                            for d, w, c in node.edges)
            lines.append(f"node{node.id} {'sin' if fn == SIN else 'cos'}(x{v}) {desc}")
            for _, _, c in node.edges:
                walk(c)

        walk(a.node)
        return "\n".join(lines)

    def validate(self, a: TrRef):
        """Assert every structural invariant; used by tests."""
        seen = set()

        def walk(node):
            if node.label is None or node.id in seen:
                return
            seen.add(node.id)
            degrees = [d for d, _, _ in node.edges]
            assert node.edges, "node without edges"
            assert degrees == sorted(set(degrees)), "degrees not strictly ascending"
            assert abs(node.edges[0][1] - 1.0) <= EPS, "leftmost weight must be 1"
            if node.label[1] == SIN:
                assert all(d < 2 for d in degrees), "sin degree must be < 2"
            for _, w, child in node.edges:
                assert abs(w) > EPS, "zero edge weight"
                if child.label is not None:
                    assert _label_key(child.label) > _label_key(node.label), \
                        "child label must be greater"
                walk(child)

        walk(a.node)
        if abs(a.weight) <= EPS:
            assert a.node is self.terminal, "zero weight requires terminal node"


def _label_key(label):
    var, fn = label
    return (var, fn)


def _min_label(la, lb):
    if la is None:
        return lb
    if lb is None:
        return la
    return la if _label_key(la) <= _label_key(lb) else lb


def _decompose(ref: TrRef, label):
    """Edge list of ``ref`` viewed at ``label``: [(degree, weighted child)]."""
    node = ref.node
    if node.label == label:
        return [(d, TrRef(ref.weight * w, c)) for d, w, c in node.edges]
    return [(0, ref)]


def _smallest_label(terms):
    best = None
    for mono, _ in terms:
        for v, a, b in mono:
            if a:
                cand = (v, SIN)
            elif b:
                cand = (v, COS)
            else:
                continue
            if best is None or cand < best:
                best = cand
    return best


def _strip_label(mono, var, fn):
    """(degree of the label in ``mono``, remaining monomial)."""
    d = 0
    rest = []
    for v, a, b in mono:
        if v == var:
            if fn == SIN:
                d = a
                if b:
                    rest.append((v, 0, b))
            else:
                d = b
                if a:
                    rest.append((v, a, 0))
        else:
            rest.append((v, a, b))
    return d, tuple(rest)
