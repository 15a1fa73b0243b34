"""Truncated Laurent series in 1/T with certified precision.

A series stores a dense window of coefficients from its leading exponent
``top`` down to ``prec``; every coefficient at an exponent >= ``prec`` is
exact, and nothing is claimed below.  Arithmetic propagates the window
pessimistically, so a coefficient is never reported unless it is certified.

The valuation is kept as the integer ``degree`` (the leading exponent);
``|x| = |T|**degree`` is never materialised as a real number.
"""

from __future__ import annotations

import json
import re

import numpy as np

from hqcf import kernels
from hqcf.algebra import AlgebraError, PolyT, RatFuncT, check_prime, prime_power_exponent


class PrecisionError(ArithmeticError):
    """A requested coefficient or operation is not certified by the tracked precision."""


def _lead_strip(arr: np.ndarray) -> tuple[int, np.ndarray]:
    k = kernels.first_nonzero(np.ascontiguousarray(arr), 0)
    return k, arr[k:]


class LaurentSeries:
    """Element of F_p((1/T)) known on the exponents top, top-1, ..., prec."""

    __slots__ = ("p", "top", "prec", "c")

    def __init__(self, top: int, prec: int, coeffs, p: int):
        p = check_prime(p)
        arr = np.remainder(np.asarray(coeffs, dtype=np.int64), p)
        if len(arr) != top - prec + 1:
            raise ValueError(f"window [{prec}, {top}] needs {top - prec + 1} coefficients, got {len(arr)}")
        skip, arr = _lead_strip(arr)
        arr.flags.writeable = False
        self.p = p
        self.top = top - skip
        self.prec = prec
        self.c = arr

    @classmethod
    def _make(cls, top: int, prec: int, arr: np.ndarray, p: int) -> "LaurentSeries":
        # arr already reduced mod p and of length top - prec + 1
        obj = cls.__new__(cls)
        skip, arr = _lead_strip(arr)
        if arr.base is not None and arr.flags.writeable:
            arr = arr.copy()
        arr.flags.writeable = False
        obj.p, obj.top, obj.prec, obj.c = p, top - skip, prec, arr
        return obj

    # constructors

    @classmethod
    def zero(cls, prec: int, p: int) -> "LaurentSeries":
        """The series O(T**(prec-1)): every coefficient >= prec is zero."""
        return cls._make(prec - 1, prec, np.zeros(0, dtype=np.int64), check_prime(p))

    @classmethod
    def from_poly(cls, a: PolyT | int, prec: int, p: int | None = None) -> "LaurentSeries":
        if not isinstance(a, PolyT):
            a = PolyT.const(int(a), p)
        if a.is_zero() or a.degree < prec:
            return cls.zero(prec, a.p)
        desc = a.c[::-1][: a.degree - prec + 1]
        if prec < 0:
            desc = np.concatenate([desc, np.zeros(-prec, dtype=np.int64)])
        return cls._make(a.degree, prec, desc.copy(), a.p)

    @classmethod
    def monomial(cls, c: int, e: int, prec: int, p: int) -> "LaurentSeries":
        if e < prec or c % p == 0:
            return cls.zero(prec, p)
        arr = np.zeros(e - prec + 1, dtype=np.int64)
        arr[0] = c % p
        return cls._make(e, prec, arr, check_prime(p))

    @classmethod
    def from_terms(cls, terms: dict[int, int], prec: int, p: int) -> "LaurentSeries":
        live = {e: c % p for e, c in terms.items() if e >= prec and c % p}
        if not live:
            return cls.zero(prec, p)
        top = max(live)
        arr = np.zeros(top - prec + 1, dtype=np.int64)
        for e, c in live.items():
            arr[top - e] = c
        return cls._make(top, prec, arr, check_prime(p))

    # inspection

    def is_zero_so_far(self) -> bool:
        return len(self.c) == 0

    @property
    def degree(self) -> int:
        if self.is_zero_so_far():
            raise PrecisionError(f"series is zero down to T^{self.prec}; its degree is not certified")
        return self.top

    @property
    def relative_precision(self) -> int:
        """Number of certified coefficients counted from the leading one."""
        return len(self.c)

    def coefficient(self, e: int) -> int:
        if e < self.prec:
            raise PrecisionError(f"coefficient of T^{e} is below the certified precision {self.prec}")
        if e > self.top:
            return 0
        return int(self.c[self.top - e])

    def window(self, hi: int, lo: int) -> np.ndarray:
        """Coefficients at exponents hi, hi-1, ..., lo (must be certified)."""
        if lo < self.prec:
            raise PrecisionError(f"window down to T^{lo} is below the certified precision {self.prec}")
        out = np.zeros(max(hi - lo + 1, 0), dtype=np.int64)
        a = max(lo, self.prec)
        b = min(hi, self.top)
        if b >= a and len(self.c):
            out[hi - b: hi - a + 1] = self.c[self.top - b: self.top - a + 1]
        return out

    def truncate(self, prec: int) -> "LaurentSeries":
        """Forget every coefficient below ``prec``."""
        if prec <= self.prec:
            return self
        if prec > self.top:
            return LaurentSeries.zero(prec, self.p)
        return LaurentSeries._make(self.top, prec, self.c[: self.top - prec + 1], self.p)

    def polynomial_part(self) -> PolyT:
        return polynomial_part(self)

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, LaurentSeries):
            if other.p != self.p:
                raise AlgebraError(f"mixing moduli {self.p} and {other.p}")
            return other
        if isinstance(other, (int, np.integer)):
            return PolyT.const(int(other), self.p)
        if isinstance(other, PolyT):
            if other.p != self.p:
                raise AlgebraError(f"mixing moduli {self.p} and {other.p}")
            return other
        if isinstance(other, RatFuncT):
            return other
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if isinstance(other, PolyT):
            other = LaurentSeries.from_poly(other, self.prec)
        elif isinstance(other, RatFuncT):
            other = series_from_ratfunc(other, self.prec)
        return series_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries._make(self.top, self.prec, (-self.c) % self.p, self.p)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if isinstance(other, PolyT):
            return mul_poly(self, other)
        if isinstance(other, RatFuncT):
            return series_mul(self, _embed_like(other, self))
        return series_mul(self, other)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentSeries":
        return series_inv(self)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if isinstance(other, (PolyT, RatFuncT)):
            return series_mul(self, _embed_like(RatFuncT.coerce(other).inverse(), self))
        return series_mul(self, series_inv(other))

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        inv = series_inv(self)
        if isinstance(other, PolyT):
            return mul_poly(inv, other)
        if isinstance(other, RatFuncT):
            return series_mul(inv, _embed_like(other, inv))
        return series_mul(other, inv)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by T**k."""
        return LaurentSeries._make(self.top + k, self.prec + k, self.c, self.p)

    def frobenius(self, r: int, floor: int | None = None) -> "LaurentSeries":
        return series_frobenius(self, r, floor)

    # comparison

    def agrees_with(self, other: "LaurentSeries") -> bool:
        """True when both series have the same coefficients on their common certified window."""
        lo = max(self.prec, other.prec)
        hi = max(self.top, other.top, lo)
        return np.array_equal(self.window(hi, lo), other.window(hi, lo))

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (self.p, self.top, self.prec) == (other.p, other.top, other.prec) and np.array_equal(self.c, other.c)

    def __hash__(self):
        return hash((self.p, self.top, self.prec, self.c.tobytes()))

    # serialisation

    def to_json(self) -> dict:
        return {"p": self.p, "top": self.top, "prec": self.prec, "coeffs": [int(v) for v in self.c]}

    @classmethod
    def from_json(cls, data: dict | str, p: int | None = None) -> "LaurentSeries":
        if isinstance(data, str):
            data = json.loads(data)
        p = data.get("p", p)
        if p is None:
            raise ValueError("series JSON carries no modulus; pass p")
        return cls(int(data["top"]), int(data["prec"]), data["coeffs"], int(p))

    def __str__(self):
        return format_series(self)

    def __repr__(self):
        return f"LaurentSeries({format_series(self, max_terms=8)}, p={self.p})"


def _embed_like(f: RatFuncT, x: LaurentSeries) -> LaurentSeries:
    # expand f with as many certified terms as x has, so f never limits a product
    n = max(len(x.c), 1)
    return series_from_ratfunc(f, f.degree - n + 1) if not f.is_zero() else LaurentSeries.zero(x.prec, x.p)


def series_add(x: LaurentSeries, y: LaurentSeries) -> LaurentSeries:
    p = x.p
    prec = max(x.prec, y.prec)
    top = max(x.top, y.top)
    if top < prec:
        return LaurentSeries.zero(prec, p)
    out = x.window(top, prec) + y.window(top, prec)
    return LaurentSeries._make(top, prec, np.remainder(out, p, out=out), p)


def series_mul(x: LaurentSeries, y: LaurentSeries) -> LaurentSeries:
    """Product; the result is certified down to max(prec_x + deg y, prec_y + deg x)."""
    p = x.p
    if x.is_zero_so_far() and y.is_zero_so_far():
        return LaurentSeries.zero(x.prec + y.prec - 1, p)
    if x.is_zero_so_far():
        return LaurentSeries.zero(x.prec + y.top, p)
    if y.is_zero_so_far():
        return LaurentSeries.zero(y.prec + x.top, p)
    prec = max(x.prec + y.top, y.prec + x.top)
    top = x.top + y.top
    n = top - prec + 1
    return LaurentSeries._make(top, prec, kernels.mul_trunc(x.c, y.c, n, p), p)


def mul_poly(x: LaurentSeries, a: PolyT) -> LaurentSeries:
    """Product with an exact polynomial; precision shifts by deg a."""
    if a.is_zero():
        return LaurentSeries.zero(x.prec, x.p)
    d = a.degree
    if x.is_zero_so_far():
        return LaurentSeries.zero(x.prec + d, x.p)
    n = len(x.c)
    return LaurentSeries._make(x.top + d, x.prec + d, kernels.mul_trunc(x.c, a.c[::-1].copy(), n, x.p), x.p)


def series_inv(x: LaurentSeries) -> LaurentSeries:
    """1/x; the certified window keeps its length, so prec moves to prec - 2*deg(x)."""
    if x.is_zero_so_far():
        raise PrecisionError(f"cannot invert a series that is zero down to T^{x.prec}")
    d = x.top
    n = len(x.c)
    return LaurentSeries._make(-d, x.prec - 2 * d, kernels.inv_series(x.c, n, x.p), x.p)


def series_frobenius(x: LaurentSeries, r: int, floor: int | None = None) -> LaurentSeries:
    """x**r for r a power of p: exponents scale by r, and the result is exact
    down to r*(prec-1)+1 because the first unknown term lands at r*(prec-1).

    ``floor`` drops every term below T**floor, which saves building a window
    r times longer than the caller needs.
    """
    prime_power_exponent(r, x.p)
    prec = r * (x.prec - 1) + 1
    if floor is not None and floor > prec:
        prec = floor
    if x.is_zero_so_far() or r * x.top < prec:
        return LaurentSeries.zero(prec, x.p)
    keep = (r * x.top - prec) // r + 1
    out = np.zeros(r * x.top - prec + 1, dtype=np.int64)
    out[::r] = x.c[:keep]
    return LaurentSeries._make(r * x.top, prec, out, x.p)


def polynomial_part(x: LaurentSeries) -> PolyT:
    """Sum of the terms with nonnegative exponent (needs prec <= 0)."""
    if x.prec > 0:
        raise PrecisionError(f"integer part not certified: precision is T^{x.prec}")
    if x.is_zero_so_far() or x.top < 0:
        return PolyT.zero(x.p)
    return PolyT(x.c[: x.top + 1][::-1].copy(), x.p)


def series_from_ratfunc(f: RatFuncT | PolyT, prec: int) -> LaurentSeries:
    """Expansion of a rational function in 1/T, certified down to T**prec."""
    f = RatFuncT.coerce(f)
    p = f.p
    if f.is_zero():
        return LaurentSeries.zero(prec, p)
    d = f.num.degree - f.den.degree
    n = d - prec + 1
    if n <= 0:
        return LaurentSeries.zero(prec, p)
    num = f.num.c[::-1].copy()
    den = f.den.c[::-1].copy()
    return LaurentSeries._make(d, prec, kernels.div_series(num, den, n, p), p)


# text form

def format_series(x: LaurentSeries, max_terms: int | None = None) -> str:
    """Render nonzero terms as ``c*T^e`` followed by ``O(T^(prec-1))``."""
    nz = np.flatnonzero(x.c)
    parts = [f"{int(x.c[i])}*T^{x.top - int(i)}" for i in nz[:max_terms]]
    if max_terms is not None and len(nz) > max_terms:
        parts.append("...")
    parts.append(f"O(T^{x.prec - 1})")
    return "+".join(parts)


_STERM = re.compile(r"\s*([+-]?)\s*(\d+)\s*\*\s*T\s*\^\s*(-?\d+)\s*")
_OTERM = re.compile(r"\s*\+?\s*O\(\s*T\s*\^\s*(-?\d+)\s*\)\s*$")


def parse_series(text: str, p: int) -> LaurentSeries:
    """Inverse of :func:`format_series`; the O-term is mandatory."""
    m = _OTERM.search(text)
    if not m:
        raise ValueError(f"series text {text!r} lacks an O(T^e) term")
    prec = int(m.group(1)) + 1
    body = text[: m.start()]
    terms: dict[int, int] = {}
    pos = 0
    while pos < len(body):
        t = _STERM.match(body, pos)
        if not t or t.end() == pos:
            raise ValueError(f"cannot parse series term in {text!r} at offset {pos}")
        sign, c, e = t.groups()
        c = int(c) * (-1 if sign == "-" else 1)
        terms[int(e)] = terms.get(int(e), 0) + c
        pos = t.end()
    if any(e < prec for e in terms):
        raise ValueError(f"term below the O-term in {text!r}")
    return LaurentSeries.from_terms(terms, prec, p)
