"""Continued fractions of Laurent series, folding, and tail transforms.

The expansion runs Euclid's algorithm on a pair of series (A, B) with
A/B the current complete quotient, starting from (x, 1).  One step is

    a = polynomial part of A/B,   (A, B) <- (B, A - a*B)

so no series is ever inverted.  Partial quotients of hyperquadratic series
are sparse (monomials, T +- 1, Frobenius powers of those), so the product
a*B costs one shifted axpy per nonzero term of a, and only the part of
A - a*B below deg B is formed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from hqcf import kernels
from hqcf.algebra import CFWord, PolyT, RatFuncT, cf_convergents, fold_rational
from hqcf.laurent import LaurentSeries, PrecisionError, mul_poly

__all__ = ["CFWord", "cf_expand", "fold", "fold_bracket", "tail_transform", "complete_quotient",
           "ExpansionResult", "verify_identities"]


@dataclass(frozen=True)
class _Win:
    """Nonzero series with leading exponent ``top``.

    ``prec`` is None for an exact value whose coefficients below the stored
    array are zero.
    """

    top: int
    prec: int | None
    c: np.ndarray
    owned: bool = False  # c may be overwritten once this value is consumed

    @property
    def low(self) -> int:
        return self.top - len(self.c) + 1

    def certified_to(self, e: int) -> bool:
        return self.prec is None or self.prec <= e

    def window(self, hi: int, lo: int) -> np.ndarray:
        """Coefficients at exponents hi..lo; a view when possible."""
        a, b = self.top - hi, self.top - lo + 1
        if 0 <= a and b <= len(self.c):
            return self.c[a:b]
        out = np.zeros(hi - lo + 1, dtype=np.int64)
        s, t = max(a, 0), min(b, len(self.c))
        if t > s:
            out[s - a:t - a] = self.c[s:t]
        return out

    def scratch(self, hi: int, lo: int) -> np.ndarray:
        """Writable coefficients at exponents hi..lo, reusing our buffer if we own it."""
        a, b = self.top - hi, self.top - lo + 1
        if self.owned and 0 <= a and b <= len(self.c):
            return self.c[a:b]
        return np.array(self.window(hi, lo), dtype=np.int64)


def _from_series(x: LaurentSeries) -> _Win | None:
    if x.is_zero_so_far():
        return None
    return _Win(x.top, x.prec, x.c)


def _quotient(num: np.ndarray, den: np.ndarray, p: int) -> tuple[np.ndarray, list[int] | None]:
    """Leading len(num) coefficients of num/den (descending arrays, den[0] != 0).

    Long division that only pays for nonzero quotient terms; falls back to a
    Newton inverse once the quotient turns out dense.  Also returns the
    positions of the nonzero terms, or None for a dense quotient.
    """
    n = len(num)
    rem = np.array(num, dtype=np.int64)
    q = np.zeros(n, dtype=np.int64)
    inv = pow(int(den[0]), p - 2, p)
    den = den[:n]
    support: list[int] = []
    j = kernels.first_nonzero(rem, 0)
    while j < n:
        if len(support) >= kernels.SPARSE_TERMS:
            q[j:] = kernels.div_series(rem[j:], den, n - j, p)
            return q, None
        c = int(rem[j]) * inv % p
        q[j] = c
        support.append(j)
        width = min(len(den), n - j)
        kernels.axpy(rem, np.ascontiguousarray(den[:width]), -c, j, p)
        j = kernels.first_nonzero(rem, j + 1)
    return q, support


def _euclid_step(A: _Win, B: _Win, p: int):
    """One step of the expansion.

    Returns (letter, R) with R the next remainder (None if it is zero on the
    certified window), or None when the letter itself is not certified.
    """
    D = A.top - B.top
    if D < 0:
        return PolyT.zero(p), A
    if not (A.certified_to(B.top) and B.certified_to(B.top - D)):
        return None
    q, support = _quotient(A.window(A.top, B.top), B.window(B.top, B.top - D), p)
    letter = PolyT(q[::-1].copy(), p)

    if A.prec is None and B.prec is None:
        prec_r, exact = min(A.low, B.low), True
    else:
        cands = [e for e in (A.prec, None if B.prec is None else B.prec + D) if e is not None]
        prec_r, exact = max(cands), False
    hi = B.top - 1
    if hi < prec_r:
        return letter, None
    rem = A.scratch(hi, prec_r)
    if support is not None:
        for i in support:
            j = D - i
            src = np.ascontiguousarray(B.window(hi - j, prec_r - j))
            kernels.axpy(rem, src, -int(q[i]), 0, p)
    else:
        prod = kernels.mul(q, np.ascontiguousarray(B.window(B.top, prec_r - D)), p)
        rem = (rem - prod[D + 1:D + 1 + len(rem)]) % p
    k = kernels.first_nonzero(rem, 0)
    if k == len(rem):
        return letter, None
    return letter, _Win(hi - k, None if exact else prec_r, rem[k:], owned=True)


@dataclass(frozen=True)
class ExpansionResult:
    letters: CFWord
    certified: int
    complete: bool  # True when the remainder vanished exactly (rational input)

    def __iter__(self):
        return iter((self.letters, self.certified))


def cf_expand(x: LaurentSeries, max_n: int) -> ExpansionResult:
    """Certified partial quotients a_0, a_1, ... of x, at most ``max_n`` of them.

    A quotient is emitted once its polynomial part is determined by the known
    coefficients; the expansion continues only while the remainder is
    certifiably nonzero.  Unpacks as ``(letters, certified)``.
    """
    p = x.p
    out: list[PolyT] = []
    A = _from_series(x)
    B = _Win(0, None, np.ones(1, dtype=np.int64))
    if A is None:
        if x.prec <= 0 and max_n > 0:
            out.append(PolyT.zero(p))
        return ExpansionResult(CFWord(out), len(out), False)
    complete = False
    while len(out) < max_n:
        step = _euclid_step(A, B, p)
        if step is None:
            break
        letter, R = step
        out.append(letter)
        if R is None:
            complete = A.prec is None and B.prec is None
            break
        A, B = B, R
    return ExpansionResult(CFWord(out), len(out), complete)


def complete_quotient(x: LaurentSeries, letters) -> LaurentSeries:
    """The tail x_{n+1} with x = [a_0, ..., a_n, x_{n+1}] for the given letters."""
    for a in letters:
        rest = x - a
        if rest.is_zero_so_far():
            raise PrecisionError("complete quotient vanishes at the tracked precision")
        x = rest.inverse()
    return x


def fold(w, tail):
    """[a_1, ..., a_n, tail] = (p_n*tail + p_{n-1}) / (q_n*tail + q_{n-1})."""
    if len(w) == 0:
        return tail
    p = w[0].p
    convs = cf_convergents(w)
    p_n, q_n = convs[-1]
    p_m, q_m = convs[-2] if len(convs) > 1 else (PolyT.const(1, p), PolyT.zero(p))
    if isinstance(tail, LaurentSeries):
        num = mul_poly(tail, p_n) + p_m
        den = mul_poly(tail, q_n) + q_m
        if den.is_zero_so_far():
            raise PrecisionError("fold denominator vanishes at the tracked precision")
        return num / den
    tail = RatFuncT.coerce(tail, p)
    if tail.is_zero():
        raise ZeroDivisionError("fold with a zero tail")
    den = tail * q_n + q_m
    if den.is_zero():
        raise ZeroDivisionError("fold denominator vanishes")
    return (tail * p_n + p_m) / den


def tail_transform(w) -> tuple[RatFuncT, RatFuncT]:
    """(f, g) with [[a_1..a_n], x] = [a_1..a_n, f*x + g] for an indeterminate x.

    Here [[a_1..a_n], x] means p_n/q_n + 1/x.  Writing the right side as
    (p_n y + p_{n-1})/(q_n y + q_{n-1}) and solving for y with the determinant
    p_n q_{n-1} - p_{n-1} q_n = (-1)**n gives y = (-1)**(n+1) x / q_n**2 - q_{n-1}/q_n.
    """
    if len(w) == 0:
        raise ValueError("tail_transform needs at least one letter")
    p = w[0].p
    convs = cf_convergents(w)
    n = len(w)
    q_n = convs[-1][1]
    q_m = convs[-2][1] if n > 1 else PolyT.zero(p)
    sign = 1 if n % 2 == 1 else -1
    f = RatFuncT(PolyT.const(sign, p), q_n * q_n)
    g = RatFuncT(-q_m, q_n)
    return f, g


def fold_bracket(w, x) -> RatFuncT:
    """[[a_1..a_n], x] = p_n/q_n + 1/x."""
    return fold_rational(w) + RatFuncT.coerce(x, w[0].p).inverse()


def _rand_poly(rng: random.Random, p: int) -> PolyT:
    d = rng.randint(1, 3)
    return PolyT([rng.randrange(p) for _ in range(d)] + [rng.randrange(1, p)], p)


def _bracket_case(rng, p, n, tail_of):
    # redraw the rare instances where the right-hand tail vanishes
    while True:
        w = CFWord(_rand_poly(rng, p) for _ in range(n))
        x = _rand_poly(rng, p)
        y = tail_of(w, x)
        if not y.is_zero():
            ok = fold_bracket(w, x) == fold(w, y)
            return ok, {"a": w.to_json(), "x": str(x)}


def verify_identities(p: int, trials: int, rng: random.Random | None = None) -> list[dict]:
    """Tail-transform identities on random polynomial instances.

    Checks the closed forms for two letters (y = -x/a_2^2 - 1/a_2) and three
    letters (y = x/(a_2a_3+1)^2 - a_2/(a_2a_3+1)), then tail_transform for one
    to five letters, each against the bracket identity [[w], x] = [w, y].
    """
    rng = rng or random.Random(0)
    one = PolyT.const(1, p)

    def two(w, x):
        return RatFuncT(-x, w[1] * w[1]) - RatFuncT(one, w[1])

    def three(w, x):
        s = w[1] * w[2] + 1
        return RatFuncT(x, s * s) - RatFuncT(w[1], s)

    def general(w, x):
        f, g = tail_transform(w)
        return f * x + g

    cases = [("two letters, closed form", 2, two), ("three letters, closed form", 3, three)]
    cases += [(f"tail_transform, {n} letters", n, general) for n in range(1, 6)]
    report = []
    for name, n, tail_of in cases:
        passes, failure = 0, None
        for _ in range(trials):
            ok, detail = _bracket_case(rng, p, n, tail_of)
            passes += ok
            if not ok and failure is None:
                failure = detail
        entry = {"rule": name, "trials": trials, "passes": passes}
        if failure is not None:
            entry["first_failure"] = failure
        report.append(entry)
    return report
