"""Selects the compiled term-list kernel, falling back to pure Python.

Set ``PQDD_PURE=1`` to force the pure-Python kernel (used by the
benchmark and as an escape hatch on platforms without a compiler).
"""

from __future__ import annotations

import os

from . import _poly_py

if os.environ.get("PQDD_PURE") == "1":
    impl = _poly_py
    USING_COMPILED = False
else:
    try:
        from . import _poly_c as impl  # type: ignore[attr-defined]

        USING_COMPILED = True
    except ImportError:
        impl = _poly_py
        USING_COMPILED = False

mono_key = impl.mono_key
compare_monomials = impl.compare_monomials
canonicalize = impl.canonicalize
mono_mul_pair = impl.mono_mul_pair
add_terms = impl.add_terms
mul_terms = impl.mul_terms
scale_terms = impl.scale_terms
conj_terms = impl.conj_terms
gcd_mono = impl.gcd_mono
div_terms = impl.div_terms
