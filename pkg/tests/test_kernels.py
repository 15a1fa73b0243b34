"""The compiled core and the numpy fallback must agree bit for bit."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hqcf import _pykernels, kernels

try:
    from hqcf import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")

PRIMES = st.sampled_from([2, 3, 5, 7, 101, 65537, 2**31 - 1])


@st.composite
def arrays(draw, min_size=0, max_size=60, lead_nonzero=False):
    p = draw(PRIMES)
    n = draw(st.integers(min_size, max_size))
    a = np.array(draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n)), dtype=np.int64)
    if lead_nonzero and n:
        a[0] = draw(st.integers(1, p - 1))
    return p, a


def _schoolbook(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + int(x) * int(y)) % p
    return out


@given(arrays(min_size=1), st.data())
def test_python_conv_matches_schoolbook(pa, data):
    p, a = pa
    b = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=1, max_size=40)), dtype=np.int64)
    assert _pykernels.conv_mod(a, b, p).tolist() == _schoolbook(a, b, p)


@needs_ext
@given(arrays(min_size=1), st.data())
def test_conv_backends_agree(pa, data):
    p, a = pa
    b = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=1, max_size=40)), dtype=np.int64)
    assert np.array_equal(_ckernels.conv_mod(a, b, p), _pykernels.conv_mod(a, b, p))


@needs_ext
@given(arrays(min_size=1), st.data())
def test_divmod_backends_agree(pa, data):
    p, a = pa
    m = data.draw(st.integers(1, len(a)))
    b = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=m, max_size=m)), dtype=np.int64)
    b[-1] = data.draw(st.integers(1, p - 1))
    qc, rc = _ckernels.poly_divmod(a, b, p)
    qp, rp = _pykernels.poly_divmod(a, b, p)
    assert np.array_equal(qc, qp) and np.array_equal(rc, rp)


@needs_ext
@given(arrays(min_size=1, lead_nonzero=True), st.data())
def test_series_div_backends_agree(pden, data):
    p, den = pden
    n = data.draw(st.integers(1, 80))
    num = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=1, max_size=n)), dtype=np.int64)
    assert np.array_equal(_ckernels.series_div(num, den, n, p), _pykernels.series_div(num, den, n, p))


@needs_ext
@given(arrays(min_size=1), st.data())
def test_axpy_backends_agree(pa, data):
    p, src = pa
    off = data.draw(st.integers(0, 10))
    c = data.draw(st.integers(-p, p))
    base = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=len(src) + off,
                                       max_size=len(src) + off + 5)), dtype=np.int64)
    x, y = base.copy(), base.copy()
    _ckernels.axpy(x, src, c, off, p)
    _pykernels.axpy(y, src, c, off, p)
    assert np.array_equal(x, y)


@needs_ext
@given(st.lists(st.integers(0, 2), max_size=300), st.integers(0, 310))
def test_first_nonzero_backends_agree(values, start):
    a = np.array(values, dtype=np.int64)
    start = min(start, len(a))
    assert _ckernels.first_nonzero(a, start) == _pykernels.first_nonzero(a, start)


def test_first_nonzero_long_run():
    a = np.zeros(100_000, dtype=np.int64)
    a[77_777] = 4
    assert _pykernels.first_nonzero(a, 0) == 77_777
    assert kernels.first_nonzero(a, 77_778) == len(a)


@given(arrays(min_size=1, max_size=400), arrays(min_size=1, max_size=400))
def test_mul_dispatch_matches_direct_convolution(pa, pb):
    p, a = pa
    b = pb[1] % p
    assert np.array_equal(kernels.mul(a, b, p), _pykernels.conv_mod(a, b, p))


@pytest.mark.parametrize("p", [3, 65537, 2**31 - 1])
def test_fft_product_is_exact_for_dense_inputs(p):
    rng = np.random.default_rng(p)
    a = rng.integers(0, p, 3000, dtype=np.int64)
    b = rng.integers(0, p, 2500, dtype=np.int64)
    got = kernels.mul(a, b, p)
    # spot check a handful of coefficients against exact integer sums
    for k in (0, 1, 1234, 2999, 4000, len(got) - 1):
        lo, hi = max(0, k - len(b) + 1), min(k, len(a) - 1)
        ref = sum(int(a[i]) * int(b[k - i]) for i in range(lo, hi + 1)) % p
        assert got[k] == ref


@pytest.mark.parametrize("p", [2, 7, 2**31 - 1])
@pytest.mark.parametrize("n", [1, 50, 129, 1000])
def test_newton_inverse(p, n):
    rng = np.random.default_rng(n)
    f = rng.integers(0, p, n, dtype=np.int64)
    f[0] = 1 + (f[0] % (p - 1)) if p > 2 else 1
    g = kernels.inv_series(f, n, p)
    prod = kernels.mul_trunc(f, g, n, p)
    assert prod[0] == 1 and not prod[1:].any()


def test_inverse_rejects_zero_constant():
    with pytest.raises(ZeroDivisionError):
        kernels.inv_series(np.array([0, 1], dtype=np.int64), 4, 5)


@pytest.mark.parametrize("p", [3, 65537])
def test_large_divmod_uses_fast_path_correctly(p):
    rng = np.random.default_rng(0)
    a = rng.integers(0, p, 6000, dtype=np.int64)
    b = rng.integers(0, p, 2500, dtype=np.int64)
    b[-1] = 1
    q, r = kernels.poly_divmod(a, b, p)
    back = kernels.mul(q, b, p)
    back[: len(r)] = (back[: len(r)] + r) % p
    assert np.array_equal(back[: len(a)], a)


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.backend_module("python") is _pykernels
    with pytest.raises(ValueError):
        kernels.backend_module("fortran")


def test_pure_python_fallback_end_to_end():
    code = (
        "from hqcf import kernels;"
        "from hqcf.solvers import SolveRequest, expand_family;"
        "print(kernels.BACKEND);"
        "print(expand_family(SolveRequest('baum_sweet', 3, 1, -64), 12).letters)"
    )
    env = dict(os.environ, HQCF_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, letters = out.stdout.splitlines()
    assert backend == "python"
    assert letters.startswith("[1, 2*T+2, 2*T, T+1, T+2")
