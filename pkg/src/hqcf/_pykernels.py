"""Pure numpy versions of the compiled kernels (same signatures and results)."""

import numpy as np


def axpy(dst, src, c, off, p):
    """In place: dst[off + i] = dst[off + i] + c * src[i]  (mod p)."""
    n = len(src)
    if off < 0 or off + n > len(dst):
        raise IndexError("axpy window out of range")
    c %= p
    if c == 0:
        return
    window = dst[off:off + n]
    window += c * np.asarray(src, dtype=np.int64)
    np.remainder(window, p, out=window)


def conv_mod(a, b, p):
    """Full convolution of a and b reduced mod p (schoolbook)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.int64)
    if (p - 1) ** 2 * min(len(a), len(b)) < 2**62:
        return np.convolve(a, b) % p
    # split the shorter operand so every partial sum stays below 2**62
    if len(a) > len(b):
        a, b = b, a
    step = max(1, 2**62 // ((p - 1) ** 2 + 1))
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for i in range(0, len(a), step):
        part = np.convolve(a[i:i + step], b) % p
        out[i:i + len(part)] = (out[i:i + len(part)] + part) % p
    return out


def poly_divmod(a, b, p):
    """Long division of ascending coefficient arrays; b must have a unit top."""
    b = np.asarray(b, dtype=np.int64)
    m = len(b)
    if m == 0:
        raise ZeroDivisionError("polynomial division by zero")
    rem = np.array(a, dtype=np.int64)
    n = len(rem)
    if n < m:
        return np.zeros(0, dtype=np.int64), rem
    quo = np.zeros(n - m + 1, dtype=np.int64)
    inv = pow(int(b[-1]), p - 2, p)
    for k in range(n - m, -1, -1):
        c = int(rem[k + m - 1]) * inv % p
        quo[k] = c
        if c:
            seg = rem[k:k + m]
            seg -= c * b
            np.remainder(seg, p, out=seg)
    return quo, rem[:m - 1]


def series_div(num, den, n, p):
    """First n coefficients of num/den as power series (den[0] must be a unit)."""
    num = np.asarray(num, dtype=np.int64)
    den = np.asarray(den, dtype=np.int64)
    out = np.zeros(max(n, 0), dtype=np.int64)
    inv = pow(int(den[0]), p - 2, p)
    rden = den[::-1]
    dn = len(den)
    wide = (p - 1) ** 2 * dn >= 2**62
    for k in range(n):
        acc = int(num[k]) if k < len(num) else 0
        lo = max(0, k - dn + 1)
        if k > lo:
            seg = rden[dn - (k - lo) - 1:dn - 1]
            if wide:
                acc -= sum(int(x) * int(y) for x, y in zip(out[lo:k], seg))
            else:
                acc -= int(np.dot(out[lo:k], seg))
        out[k] = acc * inv % p
    return out


def first_nonzero(a, start=0):
    """Index of the first nonzero entry at or after ``start``, or len(a)."""
    n = len(a)
    step = 4096
    i = start
    while i < n:
        hit = np.flatnonzero(a[i:i + step])
        if len(hit):
            return i + int(hit[0])
        i += step
        step = min(step * 2, 1 << 22)
    return n
