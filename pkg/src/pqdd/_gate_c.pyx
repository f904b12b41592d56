# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled dense-simulator kernels: in-place gate application.

All functions act on a C-contiguous (2^n, 2^n) complex matrix whose row
index has qubit 0 as the most significant bit.  Each kernel makes one
fused pass over the touched rows, so the cost is a single read + write
of the affected data.
"""

def apply_single(double complex[:, ::1] U, Py_ssize_t q,
                 double complex m00, double complex m01,
                 double complex m10, double complex m11):
    """U <- (embedded 2x2 on qubit q) . U, in place."""
    cdef Py_ssize_t dim = U.shape[0]
    cdef Py_ssize_t stride = dim >> (q + 1)  # rows between paired indices
    cdef Py_ssize_t blocks = 1 << q
    cdef Py_ssize_t a, r, col, base
    cdef double complex u0, u1
    cdef double complex *row0
    cdef double complex *row1
    with nogil:
        for a in range(blocks):
            base = a * stride * 2
            for r in range(stride):
                row0 = &U[base + r, 0]
                row1 = &U[base + stride + r, 0]
                for col in range(dim):
                    u0 = row0[col]
                    u1 = row1[col]
                    row0[col] = m00 * u0 + m01 * u1
                    row1[col] = m10 * u0 + m11 * u1


def apply_diag(double complex[:, ::1] U, Py_ssize_t q,
               double complex d0, double complex d1):
    """U <- diag(d0, d1) on qubit q . U, in place."""
    cdef Py_ssize_t dim = U.shape[0]
    cdef Py_ssize_t stride = dim >> (q + 1)
    cdef Py_ssize_t blocks = 1 << q
    cdef Py_ssize_t a, r, col, base
    cdef bint s0 = d0 != 1.0
    cdef bint s1 = d1 != 1.0
    cdef double complex *row
    with nogil:
        for a in range(blocks):
            base = a * stride * 2
            for r in range(stride):
                if s0:
                    row = &U[base + r, 0]
                    for col in range(dim):
                        row[col] = d0 * row[col]
                if s1:
                    row = &U[base + stride + r, 0]
                    for col in range(dim):
                        row[col] = d1 * row[col]


def apply_cx(double complex[:, ::1] U,
             Py_ssize_t ctrl, Py_ssize_t tgt):
    """U <- CX(ctrl, tgt) . U, in place (swap target rows where ctrl=1)."""
    cdef Py_ssize_t dim = U.shape[0]
    cdef Py_ssize_t cbit = dim >> (ctrl + 1)  # row-index bit of the control
    cdef Py_ssize_t tbit = dim >> (tgt + 1)
    cdef Py_ssize_t r, col
    cdef double complex tmp
    cdef double complex *row0
    cdef double complex *row1
    with nogil:
        for r in range(dim):
            # visit each swapped pair once: ctrl=1, tgt=0
            if (r & cbit) and not (r & tbit):
                row0 = &U[r, 0]
                row1 = &U[r | tbit, 0]
                for col in range(dim):
                    tmp = row0[col]
                    row0[col] = row1[col]
                    row1[col] = tmp


def apply_cz(double complex[:, ::1] U,
             Py_ssize_t a, Py_ssize_t b):
    """U <- CZ(a, b) . U, in place (negate rows where both bits are 1)."""
    cdef Py_ssize_t dim = U.shape[0]
    cdef Py_ssize_t abit = dim >> (a + 1)
    cdef Py_ssize_t bbit = dim >> (b + 1)
    cdef Py_ssize_t r, col
    cdef double complex *row
    with nogil:
        for r in range(dim):
            if (r & abit) and (r & bbit):
                row = &U[r, 0]
                for col in range(dim):
                    row[col] = -row[col]


def apply_swap(double complex[:, ::1] U,
               Py_ssize_t a, Py_ssize_t b):
    """U <- SWAP(a, b) . U, in place (exchange rows with differing bits)."""
    cdef Py_ssize_t dim = U.shape[0]
    cdef Py_ssize_t abit = dim >> (a + 1)
    cdef Py_ssize_t bbit = dim >> (b + 1)
    cdef Py_ssize_t r, col, other
    cdef double complex tmp
    cdef double complex *row0
    cdef double complex *row1
    with nogil:
        for r in range(dim):
            if (r & abit) and not (r & bbit):
                other = (r & ~abit) | bbit
                row0 = &U[r, 0]
                row1 = &U[other, 0]
                for col in range(dim):
                    tmp = row0[col]
                    row0[col] = row1[col]
                    row1[col] = tmp
