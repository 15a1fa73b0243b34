"""Exact arithmetic in F_p, F_p[T] and F_p(T).

Polynomials are dense: an immutable int64 array of coefficients in ascending
powers of T, with no zero at the top.  The zero polynomial has an empty array
and degree ``DEG_ZERO`` (minus infinity), which compares below every integer.
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from hqcf import kernels

DEG_ZERO = float("-inf")

MAX_EXPONENT = 2**63 - 1


class AlgebraError(ValueError):
    """Invalid parameters or operands for finite-field arithmetic."""


@lru_cache(maxsize=None)
def check_prime(p: int) -> int:
    """Return p if it is a prime usable as coefficient modulus, else raise."""
    if not isinstance(p, (int, np.integer)) or p < 2:
        raise AlgebraError(f"modulus must be a prime, got {p!r}")
    p = int(p)
    if p >= kernels.MAX_PRIME:
        raise AlgebraError(f"modulus {p} exceeds the machine-word limit 2**31")
    if p % 2 == 0 and p != 2:
        raise AlgebraError(f"{p} is not prime")
    d = 3
    while d * d <= p:
        if p % d == 0:
            raise AlgebraError(f"{p} is not prime")
        d += 2
    return p


def prime_power_exponent(r: int, p: int) -> int:
    """Return t with r == p**t and t >= 1, raising if r is not such a power."""
    if r < p:
        raise AlgebraError(f"r={r} is not a positive power of p={p}")
    t = 0
    q = r
    while q % p == 0:
        q //= p
        t += 1
    if q != 1:
        raise AlgebraError(f"r={r} is not a power of p={p}")
    return t


def fp_inv(c: int, p: int) -> int:
    c %= p
    if c == 0:
        raise ZeroDivisionError("0 has no inverse in F_p")
    return pow(c, p - 2, p)


def _strip(arr: np.ndarray) -> np.ndarray:
    if len(arr) and arr[-1]:
        return arr
    nz = np.flatnonzero(arr)
    if len(nz) == 0:
        return arr[:0]
    top = nz[-1] + 1
    return arr[:top] if top < len(arr) else arr


class PolyT:
    """Dense polynomial in T over F_p."""

    __slots__ = ("p", "c", "_hash")

    def __init__(self, coeffs: Iterable[int] | np.ndarray = (), p: int = 2, *, _trusted: bool = False):
        if _trusted:
            arr = coeffs
        else:
            p = check_prime(p)
            arr = np.remainder(np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                                          dtype=np.int64), p)
            arr = _strip(arr)
        if arr.flags.writeable:
            if arr.base is not None:
                arr = arr.copy()
            arr.flags.writeable = False
        self.p = p
        self.c = arr
        self._hash = None

    @classmethod
    def _raw(cls, arr: np.ndarray, p: int) -> "PolyT":
        # arr must already be reduced mod p
        return cls(_strip(arr), p, _trusted=True)

    # constructors

    @classmethod
    def zero(cls, p: int) -> "PolyT":
        return cls((), p)

    @classmethod
    def const(cls, c: int, p: int) -> "PolyT":
        return cls((c,), p)

    @classmethod
    def monomial(cls, c: int, e: int, p: int) -> "PolyT":
        if e < 0:
            raise AlgebraError("negative exponent in a polynomial")
        if e > MAX_EXPONENT:
            raise OverflowError(f"exponent {e} exceeds 64-bit range")
        c %= check_prime(p)
        if c == 0:
            return cls.zero(p)
        arr = np.zeros(e + 1, dtype=np.int64)
        arr[e] = c
        return cls._raw(arr, p)

    @classmethod
    def T(cls, p: int) -> "PolyT":
        return cls.monomial(1, 1, p)

    @classmethod
    def parse(cls, text: str, p: int) -> "PolyT":
        return parse_poly(text, p)

    # basic properties

    @property
    def degree(self) -> int | float:
        return len(self.c) - 1 if len(self.c) else DEG_ZERO

    def is_zero(self) -> bool:
        return len(self.c) == 0

    @property
    def lead(self) -> int:
        return int(self.c[-1]) if len(self.c) else 0

    def coeff(self, e: int) -> int:
        return int(self.c[e]) if 0 <= e < len(self.c) else 0

    def terms(self) -> list[tuple[int, int]]:
        """Nonzero (exponent, coefficient) pairs, highest exponent first."""
        nz = np.flatnonzero(self.c)[::-1]
        return [(int(e), int(self.c[e])) for e in nz]

    def residue_at_zero(self) -> int:
        return int(self.c[0]) if len(self.c) else 0

    def is_monic(self) -> bool:
        return self.lead == 1

    def monic(self) -> "PolyT":
        if self.is_zero() or self.lead == 1:
            return self
        return self.scale(fp_inv(self.lead, self.p))

    def scale(self, c: int) -> "PolyT":
        c %= self.p
        return PolyT._raw(self.c * c % self.p, self.p)

    def shift(self, k: int) -> "PolyT":
        """Multiply by T**k; a negative k must divide exactly."""
        if self.is_zero() or k == 0:
            return self
        if k < 0:
            if np.any(self.c[:-k]):
                raise AlgebraError(f"T^{-k} does not divide {self}")
            return PolyT._raw(self.c[-k:].copy(), self.p)
        return PolyT._raw(np.concatenate([np.zeros(k, dtype=np.int64), self.c]), self.p)

    # arithmetic

    def _coerce(self, other) -> "PolyT":
        if isinstance(other, PolyT):
            if other.p != self.p:
                raise AlgebraError(f"mixing moduli {self.p} and {other.p}")
            return other
        if isinstance(other, (int, np.integer)):
            return PolyT.const(int(other), self.p)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = a.copy()
        out[:len(b)] += b
        return PolyT._raw(np.remainder(out, self.p, out=out), self.p)

    __radd__ = __add__

    def __neg__(self):
        return PolyT._raw((-self.c) % self.p, self.p)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return PolyT.zero(self.p)
        return PolyT._raw(kernels.mul(self.c, other.c, self.p), self.p)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise AlgebraError("negative power of a polynomial")
        result = PolyT.const(1, self.p)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q, r = kernels.poly_divmod(self.c, other.c, self.p)
        return PolyT._raw(q, self.p), PolyT._raw(np.asarray(r, dtype=np.int64), self.p)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> "PolyT":
        """Quotient self/other, raising if the division leaves a remainder."""
        q, r = divmod(self, other)
        if not r.is_zero():
            raise AlgebraError(f"{other} does not divide {self}")
        return q

    def divides(self, other: "PolyT") -> bool:
        return (other % self).is_zero()

    def frobenius(self, r: int) -> "PolyT":
        return poly_frobenius(self, r)

    def __call__(self, x: int) -> int:
        acc = 0
        for v in self.c[::-1]:
            acc = (acc * x + int(v)) % self.p
        return acc

    # comparisons and hashing

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = PolyT.const(int(other), self.p)
        if not isinstance(other, PolyT):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.c, other.c)

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.c.tobytes()))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"PolyT({format_poly(self)!r}, p={self.p})"


def poly_frobenius(a: PolyT, r: int) -> PolyT:
    """a**r for r a power of p, computed by spreading exponents (coefficients are fixed by Fermat)."""
    prime_power_exponent(r, a.p)
    if a.is_zero():
        return a
    deg = a.degree
    if deg * r > MAX_EXPONENT:
        raise OverflowError(f"degree {deg}*{r} exceeds 64-bit range")
    out = np.zeros(deg * r + 1, dtype=np.int64)
    out[::r] = a.c
    return PolyT(out, a.p, _trusted=True)


def residue_at_zero(a: PolyT) -> int:
    """a(0), the class of a modulo T."""
    return a.residue_at_zero()


def poly_gcd(a: PolyT, b: PolyT) -> PolyT:
    """Monic gcd (zero only when both inputs are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


# text grammar

_TERM = re.compile(r"([+-]?)\s*(\d+)?\s*(\*?\s*T(?:\s*\^\s*(\d+))?)?\s*")


def parse_poly(text: str, p: int) -> PolyT:
    """Parse sums of terms ``c*T^e``, ``c*T``, ``T^e``, ``T``, ``c`` with optional signs."""
    p = check_prime(p)
    s = text.strip()
    if not s:
        raise AlgebraError("empty polynomial text")
    pos = 0
    coeffs: dict[int, int] = {}
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        sign, num, tpart, exp = m.groups() if m else (None,) * 4
        if not m or m.end() == pos or (num is None and tpart is None):
            raise AlgebraError(f"cannot parse polynomial {text!r} at offset {pos}")
        if not first and not sign:
            raise AlgebraError(f"missing operator in {text!r} at offset {pos}")
        if tpart is not None and tpart.lstrip().startswith("*") and num is None:
            raise AlgebraError(f"dangling '*' in {text!r}")
        c = int(num) if num is not None else 1
        if sign == "-":
            c = -c
        e = 0 if tpart is None else (int(exp) if exp is not None else 1)
        coeffs[e] = coeffs.get(e, 0) + c
        pos = m.end()
        first = False
    deg = max(coeffs)
    arr = np.zeros(deg + 1, dtype=np.int64)
    for e, c in coeffs.items():
        arr[e] = c % p
    return PolyT(arr, p)


def format_poly(a: PolyT) -> str:
    """Render as e.g. ``2*T^3+T+2``; unit coefficients are omitted before T."""
    if a.is_zero():
        return "0"
    parts = []
    for e, c in a.terms():
        if e == 0:
            parts.append(str(c))
        else:
            mono = "T" if e == 1 else f"T^{e}"
            parts.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(parts)


# rational functions

class RatFuncT:
    """Reduced quotient num/den of polynomials with den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: PolyT, den: PolyT | None = None, *, _reduced: bool = False):
        if den is None:
            den = PolyT.const(1, num.p)
        if num.p != den.p:
            raise AlgebraError(f"mixing moduli {num.p} and {den.p}")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            if num.is_zero():
                den = PolyT.const(1, num.p)
            else:
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num, den = num.exact_div(g), den.exact_div(g)
                lc = fp_inv(den.lead, den.p)
                num, den = num.scale(lc), den.scale(lc)
        self.num = num
        self.den = den

    @property
    def p(self) -> int:
        return self.num.p

    @property
    def degree(self) -> int | float:
        if self.num.is_zero():
            return DEG_ZERO
        return self.num.degree - self.den.degree

    def is_zero(self) -> bool:
        return self.num.is_zero()

    @classmethod
    def coerce(cls, x, p: int | None = None) -> "RatFuncT":
        if isinstance(x, RatFuncT):
            return x
        if isinstance(x, PolyT):
            return cls(x, PolyT.const(1, x.p), _reduced=True)
        if isinstance(x, (int, np.integer)) and p is not None:
            return cls(PolyT.const(int(x), p), PolyT.const(1, p), _reduced=True)
        raise TypeError(f"cannot interpret {x!r} as a rational function")

    def _other(self, other):
        if isinstance(other, (RatFuncT, PolyT)):
            return RatFuncT.coerce(other)
        if isinstance(other, (int, np.integer)):
            return RatFuncT.coerce(int(other), self.p)
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RatFuncT(self.num + other.num, self.den)
        return RatFuncT(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFuncT(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFuncT(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFuncT":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of the zero rational function")
        return RatFuncT(self.den, self.num)

    def __truediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RatFuncT(self.num ** e, self.den ** e, _reduced=True)

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def __eq__(self, other):
        if isinstance(other, (PolyT, int, np.integer)):
            other = self._other(other)
        if not isinstance(other, RatFuncT):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den.degree == 0:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RatFuncT({self})"


# continued-fraction words

class CFWord(tuple):
    """Finite sequence of partial quotients (polynomials)."""

    def __new__(cls, letters: Iterable[PolyT] = ()):
        return super().__new__(cls, letters)

    def __getitem__(self, item):
        out = super().__getitem__(item)
        return CFWord(out) if isinstance(item, slice) else out

    def __add__(self, other):
        return CFWord(tuple(self) + tuple(other))

    def __radd__(self, other):
        return CFWord(tuple(other) + tuple(self))

    def __neg__(self):
        return CFWord(-a for a in self)

    def reversed(self) -> "CFWord":
        return CFWord(self[::-1])

    def to_json(self) -> list[str]:
        return [format_poly(a) for a in self]

    @classmethod
    def from_json(cls, items: Sequence[str], p: int) -> "CFWord":
        return cls(parse_poly(s, p) for s in items)

    def __str__(self):
        return "[" + ", ".join(format_poly(a) for a in self) + "]"

    def __repr__(self):
        return f"CFWord({self})"


def ratfunc_cf(f: RatFuncT | PolyT) -> CFWord:
    """Finite continued fraction [l_1, ..., l_n] of a rational function (Euclid).

    All letters after the first have positive degree.  A zero input gives [0].
    """
    f = RatFuncT.coerce(f)
    num, den = f.num, f.den
    letters: list[PolyT] = []
    while True:
        q, rem = divmod(num, den)
        letters.append(q)
        if rem.is_zero():
            break
        num, den = den, rem
    # Euclid already yields nonconstant quotients after the first; merge a constant
    # tail anyway so the normal form is explicit: [.., a, c] = [.., a + 1/c]
    while len(letters) >= 2 and letters[-1].degree <= 0:
        c = letters.pop()
        letters[-1] = letters[-1] + fp_inv(c.lead, c.p)
    return CFWord(letters)


def cf_convergents(w: Sequence[PolyT]) -> list[tuple[PolyT, PolyT]]:
    """Convergents (p_i, q_i) of [a_1, ..., a_n] by the three-term recurrence.

    With 0-based i, p_i * q_{i-1} - p_{i-1} * q_i = (-1)**(i-1).
    """
    if not w:
        return []
    p = w[0].p
    one, zero = PolyT.const(1, p), PolyT.zero(p)
    p_prev, q_prev = one, zero
    p_cur, q_cur = w[0], one
    out = [(p_cur, q_cur)]
    for a in w[1:]:
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        out.append((p_cur, q_cur))
    return out


def fold_rational(w: Sequence[PolyT]) -> RatFuncT:
    """Value of the finite continued fraction [a_1, ..., a_n]."""
    p_n, q_n = cf_convergents(w)[-1]
    return RatFuncT(p_n, q_n)
