"""Pure-Python kernel for canonical trigonometric-polynomial term lists.

Shared data layout (also used by the compiled kernel):

* monomial: tuple of ``(var_id, sin_exp, cos_exp)`` triples, sorted by
  ``var_id``, with ``sin_exp`` in {0, 1}, ``cos_exp`` >= 0 and never both
  exponents zero.  The empty tuple is the constant monomial.
* term list: tuple of ``(monomial, complex)`` pairs, strictly sorted by
  the term order and free of near-zero coefficients.

The term order puts sin(x0) before cos(x0) before sin(x1) and so on;
on exponent vectors this is the reverse of the plain lexicographic
order, with the constant monomial greatest.
"""

from __future__ import annotations

# Sentinel var id; real ids are dense small ints.
_END = (1 << 60, 0, 0)


def mono_key(mono):
    """Sort key: ascending key order == ascending term order."""
    return tuple((v, -a, -b) for v, a, b in mono) + (_END,)


def compare_monomials(m1, m2):
    k1, k2 = mono_key(m1), mono_key(m2)
    if k1 < k2:
        return -1
    if k1 > k2:
        return 1
    return 0


def canonicalize(pairs, eps):
    """Merge duplicate monomials, prune tiny coefficients, sort."""
    acc = {}
    for mono, coeff in pairs:
        if mono in acc:
            acc[mono] += coeff
        else:
            acc[mono] = coeff
    out = [(mono, c) for mono, c in acc.items() if abs(c) > eps]
    out.sort(key=lambda t: mono_key(t[0]))
    return tuple(out)


def mono_mul_pair(m1, m2):
    """Product of two monomials as a term list (sin^2 -> 1 - cos^2)."""
    merged = {}
    for v, a, b in m1:
        merged[v] = (a, b)
    for v, a, b in m2:
        if v in merged:
            a0, b0 = merged[v]
            merged[v] = (a0 + a, b0 + b)
        else:
            merged[v] = (a, b)
    plain = []     # entries that need no reduction
    squared = []   # (var, cos_exp) for sin-exponent 2 entries
    for v in sorted(merged):
        a, b = merged[v]
        if a >= 2:
            squared.append((v, b))
        elif (a, b) != (0, 0):
            plain.append((v, a, b))
    terms = [(dict((v, (a, b)) for v, a, b in plain), 1.0 + 0.0j)]
    for v, b in squared:
        nxt = []
        for ent, c in terms:
            lo = dict(ent)
            if b > 0:
                lo[v] = (0, b)
            hi = dict(ent)
            hi[v] = (0, b + 2)
            nxt.append((lo, c))
            nxt.append((hi, -c))
        terms = nxt
    out = []
    for ent, c in terms:
        mono = tuple((v, a, b) for v, (a, b) in sorted(ent.items()))
        out.append((mono, c))
    return out


def add_terms(f, g, eps):
    return canonicalize(list(f) + list(g), eps)


def mul_terms(f, g, eps):
    pairs = []
    for mf, cf in f:
        for mg, cg in g:
            c = cf * cg
            for mono, sign in mono_mul_pair(mf, mg):
                pairs.append((mono, c * sign))
    return canonicalize(pairs, eps)


def scale_terms(f, c, eps):
    if abs(c) <= eps:
        return ()
    return tuple((mono, coeff * c) for mono, coeff in f if abs(coeff * c) > eps)


def conj_terms(f):
    return tuple((mono, coeff.conjugate()) for mono, coeff in f)


def gcd_mono(f, g):
    """Componentwise-min monomial dividing every term of both lists.

    Empty lists (zero polynomials) are ignored; the gcd over no terms
    at all is the constant monomial.
    """
    terms = list(f) + list(g)
    if not terms:
        return ()
    acc = None
    for mono, _ in terms:
        cur = {v: (a, b) for v, a, b in mono}
        if acc is None:
            acc = cur
        else:
            nxt = {}
            for v, (a, b) in acc.items():
                if v in cur:
                    a2, b2 = cur[v]
                    e = (min(a, a2), min(b, b2))
                    if e != (0, 0):
                        nxt[v] = e
            acc = nxt
        if not acc:
            return ()
    return tuple((v, a, b) for v, (a, b) in sorted(acc.items()))


def div_terms(f, mono, c):
    """Divide every term of ``f`` by ``c`` times ``mono`` (must divide)."""
    if mono == () and c == 1:
        return tuple(f)
    fac = {v: (a, b) for v, a, b in mono}
    out = []
    for m, coeff in f:
        ent = []
        for v, a, b in m:
            if v in fac:
                da, db = fac[v]
                a, b = a - da, b - db
            if (a, b) != (0, 0):
                ent.append((v, a, b))
        out.append((tuple(ent), coeff / c))
    return tuple(out)
