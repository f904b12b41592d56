# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernel for canonical trigonometric-polynomial term lists.

Same data layout and semantics as the pure-Python twin (_poly_py); that
module's docstring is the layout reference.  Kept in lockstep — the
parity test compares every operation against the pure kernel.
"""

_END = (1 << 60, 0, 0)


def mono_key(mono):
    """Sort key: ascending key order == ascending term order."""
    cdef list out = []
    cdef long long v
    cdef int a, b
    for v, a, b in mono:
        out.append((v, -a, -b))
    out.append(_END)
    return tuple(out)


def compare_monomials(m1, m2):
    k1 = mono_key(m1)
    k2 = mono_key(m2)
    if k1 < k2:
        return -1
    if k1 > k2:
        return 1
    return 0


def canonicalize(pairs, double eps):
    """Merge duplicate monomials, prune tiny coefficients, sort."""
    cdef dict acc = {}
    cdef double complex coeff
    for mono, coeff in pairs:
        if mono in acc:
            acc[mono] = acc[mono] + coeff
        else:
            acc[mono] = coeff
    cdef list out = []
    cdef double complex c
    for mono, c in acc.items():
        if abs(c) > eps:
            out.append((mono, c))
    out.sort(key=_sort_key)
    return tuple(out)


def _sort_key(term):
    return mono_key(term[0])


def mono_mul_pair(m1, m2):
    """Product of two monomials as a term list (sin^2 -> 1 - cos^2)."""
    cdef dict merged = {}
    cdef long long v
    cdef int a, b, a0, b0
    for v, a, b in m1:
        merged[v] = (a, b)
    for v, a, b in m2:
        if v in merged:
            a0, b0 = merged[v]
            merged[v] = (a0 + a, b0 + b)
        else:
            merged[v] = (a, b)
    cdef list plain = []
    cdef list squared = []
    for v in sorted(merged):
        a, b = merged[v]
        if a >= 2:
            squared.append((v, b))
        elif a != 0 or b != 0:
            plain.append((v, a, b))
    cdef list terms = [(dict((v, (a, b)) for v, a, b in plain), 1.0 + 0.0j)]
    cdef list nxt
    cdef double complex c
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
    cdef list out = []
    for ent, c in terms:
        mono = tuple((v, ab[0], ab[1]) for v, ab in sorted(ent.items()))
        out.append((mono, c))
    return out


def add_terms(f, g, double eps):
    return canonicalize(list(f) + list(g), eps)


def mul_terms(f, g, double eps):
    cdef list pairs = []
    cdef double complex cf, cg, c, sign
    for mf, cf in f:
        for mg, cg in g:
            c = cf * cg
            for mono, sign in mono_mul_pair(mf, mg):
                pairs.append((mono, c * sign))
    return canonicalize(pairs, eps)


def scale_terms(f, double complex c, double eps):
    if abs(c) <= eps:
        return ()
    cdef list out = []
    cdef double complex coeff, scaled
    for mono, coeff in f:
        scaled = coeff * c
        if abs(scaled) > eps:
            out.append((mono, scaled))
    return tuple(out)


def conj_terms(f):
    cdef list out = []
    cdef double complex coeff
    for mono, coeff in f:
        out.append((mono, coeff.conjugate()))
    return tuple(out)


def gcd_mono(f, g):
    """Componentwise-min monomial dividing every term of both lists."""
    cdef list terms = list(f) + list(g)
    if not terms:
        return ()
    cdef dict acc = None
    cdef dict cur, nxt
    cdef long long v
    cdef int a, b, a2, b2, ea, eb
    for mono, _ in terms:
        cur = {}
        for v, a, b in mono:
            cur[v] = (a, b)
        if acc is None:
            acc = cur
        else:
            nxt = {}
            for v, ab in acc.items():
                if v in cur:
                    a, b = ab
                    a2, b2 = cur[v]
                    ea = a if a < a2 else a2
                    eb = b if b < b2 else b2
                    if ea != 0 or eb != 0:
                        nxt[v] = (ea, eb)
            acc = nxt
        if not acc:
            return ()
    return tuple((v, ab[0], ab[1]) for v, ab in sorted(acc.items()))


def div_terms(f, mono, double complex c):
    """Divide every term of ``f`` by ``c`` times ``mono`` (must divide)."""
    if mono == () and c == 1:
        return tuple(f)
    cdef dict fac = {}
    cdef long long v
    cdef int a, b, da, db
    for v, a, b in mono:
        fac[v] = (a, b)
    cdef list out = []
    cdef list ent
    cdef double complex coeff
    for m, coeff in f:
        ent = []
        for v, a, b in m:
            if v in fac:
                da, db = fac[v]
                a, b = a - da, b - db
            if a != 0 or b != 0:
                ent.append((v, a, b))
        out.append((tuple(ent), coeff / c))
    return tuple(out)
