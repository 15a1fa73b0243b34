# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops over F_p coefficient arrays.

Every array is a contiguous int64 buffer with entries in [0, p), and p < 2**31
so that a single product fits in a signed 64-bit word.
"""

import numpy as np

ctypedef long long i64

cdef inline i64 _mod(i64 v, i64 p) nogil:
    v = v % p
    if v < 0:
        v += p
    return v


def axpy(i64[::1] dst, const i64[::1] src, i64 c, Py_ssize_t off, i64 p):
    """In place: dst[off + i] = dst[off + i] + c * src[i]  (mod p)."""
    cdef Py_ssize_t i, n = src.shape[0]
    if off < 0 or off + n > dst.shape[0]:
        raise IndexError("axpy window out of range")
    c = _mod(c, p)
    if c == 0:
        return
    with nogil:
        for i in range(n):
            dst[off + i] = (dst[off + i] + c * src[i]) % p


def conv_mod(const i64[::1] a, const i64[::1] b, i64 p):
    """Full convolution of a and b reduced mod p (schoolbook)."""
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], i, j
    if n == 0 or m == 0:
        return np.zeros(0, dtype=np.int64)
    out = np.zeros(n + m - 1, dtype=np.int64)
    cdef i64[::1] o = out
    cdef i64 ai
    cdef i64 budget = (2**62) // ((p - 1) * (p - 1) + 1)
    cdef i64 used = 0
    with nogil:
        for i in range(n):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(m):
                o[i + j] += ai * b[j]
            used += 1
            if used >= budget:
                for j in range(n + m - 1):
                    o[j] = o[j] % p
                used = 0
        for j in range(n + m - 1):
            o[j] = o[j] % p
    return out


def poly_divmod(const i64[::1] a, const i64[::1] b, i64 p):
    """Long division of ascending coefficient arrays; b must have a unit top."""
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], i, j, k
    if m == 0:
        raise ZeroDivisionError("polynomial division by zero")
    if n < m:
        return np.zeros(0, dtype=np.int64), np.array(a, dtype=np.int64)
    rem = np.array(a, dtype=np.int64)
    quo = np.zeros(n - m + 1, dtype=np.int64)
    cdef i64[::1] r = rem
    cdef i64[::1] q = quo
    cdef i64 inv = pow(int(b[m - 1]), int(p - 2), int(p))
    cdef i64 c
    with nogil:
        for k in range(n - m, -1, -1):
            c = (r[k + m - 1] * inv) % p
            q[k] = c
            if c == 0:
                continue
            for j in range(m):
                r[k + j] = _mod(r[k + j] - c * b[j], p)
    return quo, rem[: m - 1]


def series_div(const i64[::1] num, const i64[::1] den, Py_ssize_t n, i64 p):
    """First n coefficients of num/den as power series (den[0] must be a unit)."""
    cdef Py_ssize_t k, j, lo, dn = den.shape[0], nn = num.shape[0]
    out = np.zeros(max(n, 0), dtype=np.int64)
    cdef i64[::1] o = out
    cdef i64 inv = pow(int(den[0]), int(p - 2), int(p))
    cdef i64 acc
    with nogil:
        for k in range(n):
            acc = num[k] if k < nn else 0
            lo = k - dn + 1
            if lo < 0:
                lo = 0
            for j in range(lo, k):
                acc = (acc - o[j] * den[k - j]) % p
            o[k] = _mod(acc * inv, p)
    return out


def first_nonzero(const i64[::1] a, Py_ssize_t start=0):
    """Index of the first nonzero entry at or after ``start``, or len(a)."""
    cdef Py_ssize_t i = start, n = a.shape[0]
    if i < 0:
        i = 0
    with nogil:
        while i < n and a[i] == 0:
            i += 1
    return i
