"""Coefficient-array arithmetic over F_p with a compiled core.

The compiled module ``hqcf._ckernels`` is used when it was built; otherwise the
numpy implementations in ``hqcf._pykernels`` take over.  Setting the
environment variable ``HQCF_PURE_PYTHON=1`` forces the fallback.

Arrays are int64 with entries in [0, p).  Everything here is indifferent to
whether the array is read as ascending powers of T or of 1/T; callers choose.
"""

from __future__ import annotations

import os

import numpy as np

from hqcf import _pykernels

try:
    if os.environ.get("HQCF_PURE_PYTHON"):
        raise ImportError("pure python backend requested")
    from hqcf import _ckernels as _impl
    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

MAX_PRIME = 2**31

# crossover points, tuned with benchmarks/bench_kernels.py
SPARSE_TERMS = 24
SCHOOLBOOK_LEN = 96
NEWTON_BASE = 128
DIVMOD_NAIVE_WORK = 1 << 22
PY_NAIVE_STEPS = 2048

_FFT_BOUND = 2.0**40

axpy = _impl.axpy
first_nonzero = _impl.first_nonzero


def backend_module(name: str | None = None):
    """Return the kernel module for ``name`` ("cython"/"python"), or the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        from hqcf import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def as_coeffs(values, p: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int64)
    return np.remainder(arr, p)


def _fft_conv_exact(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    n = len(a) + len(b) - 1
    size = 1 << (n - 1).bit_length()
    short = min(len(a), len(b))
    if (p - 1) ** 2 * short < _FFT_BOUND:
        fa = np.fft.rfft(a.astype(np.float64), size)
        fb = np.fft.rfft(b.astype(np.float64), size)
        out = np.fft.irfft(fa * fb, size)[:n]
        return np.remainder(np.rint(out).astype(np.int64), p)
    # split into limbs of `bits` bits so every grouped limb product stays exact
    width = (p - 1).bit_length()
    bits = width
    while bits > 1:
        limbs = -(-width // bits)
        if limbs * 4.0**bits * short < _FFT_BOUND:
            break
        bits -= 1
    limbs = -(-width // bits)
    mask = (1 << bits) - 1
    fa = [np.fft.rfft(((a >> (bits * i)) & mask).astype(np.float64), size) for i in range(limbs)]
    fb = [np.fft.rfft(((b >> (bits * i)) & mask).astype(np.float64), size) for i in range(limbs)]
    out = np.zeros(n, dtype=np.int64)
    for s in range(2 * limbs - 1):
        acc = np.zeros_like(fa[0])
        for i in range(max(0, s - limbs + 1), min(s, limbs - 1) + 1):
            acc += fa[i] * fb[s - i]
        part = np.rint(np.fft.irfft(acc, size)[:n])
        part = np.remainder(part, p).astype(np.int64)
        scale = pow(2, bits * s, p)
        out = (out + (part * scale) % p) % p
    return out


def _sparse_conv(a: np.ndarray, b: np.ndarray, p: int, nz: np.ndarray) -> np.ndarray:
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for i in nz:
        _impl.axpy(out, b, int(a[i]), int(i), p)
    return out


def mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Full product of two coefficient arrays mod p."""
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.int64)
    if len(a) > len(b):
        a, b = b, a
    nz = np.flatnonzero(a)
    if len(nz) <= SPARSE_TERMS:
        return _sparse_conv(a, b, p, nz)
    nzb = np.flatnonzero(b)
    if len(nzb) <= SPARSE_TERMS:
        return _sparse_conv(b, a, p, nzb)
    if len(a) <= SCHOOLBOOK_LEN:
        return _impl.conv_mod(np.ascontiguousarray(a), np.ascontiguousarray(b), p)
    return _fft_conv_exact(a, b, p)


def mul_trunc(a: np.ndarray, b: np.ndarray, n: int, p: int) -> np.ndarray:
    """First n coefficients of a*b (zero padded if the product is shorter)."""
    out = mul(a[:n], b[:n], p)[:n]
    if len(out) < n:
        out = np.concatenate([out, np.zeros(n - len(out), dtype=np.int64)])
    return out


def inv_series(f: np.ndarray, n: int, p: int) -> np.ndarray:
    """First n coefficients of 1/f as a power series; f[0] must be nonzero."""
    if n <= 0:
        return np.zeros(0, dtype=np.int64)
    if f[0] % p == 0:
        raise ZeroDivisionError("series with zero constant term is not invertible")
    if n <= NEWTON_BASE:
        return _impl.series_div(np.ones(1, dtype=np.int64), np.ascontiguousarray(f[:n]), n, p)
    half = (n + 1) // 2
    g = inv_series(f, half, p)
    # g' = g - g * (f*g - 1), and f*g - 1 vanishes below degree `half`
    fg = mul_trunc(f, g, n, p)
    h = fg[half:]
    corr = mul_trunc(g, h, n - half, p)
    return np.concatenate([g, (-corr) % p])


def _naive_fits(steps: int, width: int) -> bool:
    # the numpy fallback pays interpreter overhead per step, the compiled core per element
    if BACKEND == "cython":
        return steps * width <= DIVMOD_NAIVE_WORK or width <= 16
    return steps <= PY_NAIVE_STEPS


def div_series(num: np.ndarray, den: np.ndarray, n: int, p: int) -> np.ndarray:
    """First n coefficients of num/den as power series."""
    dn = min(len(den), n)
    if _naive_fits(n, dn):
        return _impl.series_div(np.ascontiguousarray(num[:n]), np.ascontiguousarray(den[:n]), n, p)
    return mul_trunc(num, inv_series(den, n, p), n, p)


def poly_divmod(a: np.ndarray, b: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Quotient and remainder of ascending arrays a, b (b with nonzero top)."""
    n, m = len(a), len(b)
    if m == 0:
        raise ZeroDivisionError("polynomial division by zero")
    if n < m:
        return np.zeros(0, dtype=np.int64), np.array(a, dtype=np.int64)
    k = n - m + 1
    if _naive_fits(k, m):
        return _impl.poly_divmod(np.ascontiguousarray(a), np.ascontiguousarray(b), p)
    # reversed-coefficient trick: rev(q) = rev(a) / rev(b) mod x^k
    q = div_series(a[::-1].copy(), b[::-1].copy(), k, p)[::-1].copy()
    r = (np.asarray(a[:m - 1], dtype=np.int64) - mul(q, b, p)[:m - 1]) % p
    return q, r
