"""Recursive words of partial quotients and their exponent sequences.

Words are built by structural recursion and memoised per depth, so the
streams deepen without recomputing earlier levels.  All arithmetic happens
in F_p from the start; for p = 2 the signs simply collapse.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

from hqcf.algebra import MAX_EXPONENT, AlgebraError, CFWord, PolyT, check_prime, prime_power_exponent

# largest degree stored densely in a single letter (128 MiB of coefficients)
MAX_LETTER_DEGREE = 1 << 24


class WordError(ValueError):
    """Invalid word request."""


class PrefixViolation(WordError):
    """A deeper word failed to extend the shallower one."""


class DivisibilityError(WordError):
    """A letter that must be divisible by T is not."""


def _check(p: int, r: int) -> tuple[int, int]:
    check_prime(p)
    prime_power_exponent(r, p)
    if r <= 2:
        raise WordError(f"r>2 required (got r={r})")
    return p, r


def exp_value(kind: str, r: int, k: int) -> int:
    """lambda_k (lambda_1 = r) or omega_k (omega_1 = r-2), with x_{k+1} = r*x_k - 2."""
    if k < 1:
        raise WordError("depth k must be >= 1")
    if kind == "lambda":
        v = r
    elif kind == "omega":
        v = r - 2
    else:
        raise WordError(f"unknown exponent sequence {kind!r}")
    for _ in range(k - 1):
        v = r * v - 2
        if v > MAX_EXPONENT:
            raise OverflowError(f"{kind}_{k} for r={r} exceeds the 64-bit range")
    if v <= 0:
        raise WordError(f"{kind}_{k} = {v} is not positive; r>2 required")
    return v


def _mono(c: int, e: int, p: int) -> PolyT:
    if e > MAX_LETTER_DEGREE:
        raise OverflowError(f"letter degree {e} is too large to store")
    return PolyT.monomial(c, e, p)


def _frob(a: PolyT, r: int) -> PolyT:
    if a.degree * r > MAX_LETTER_DEGREE:
        raise OverflowError(f"letter degree {a.degree * r} is too large to store")
    return a.frobenius(r)


def _div_T2(a: PolyT, where: str) -> PolyT:
    try:
        return a.shift(-2)
    except AlgebraError as exc:
        raise DivisibilityError(f"{where}: {exc}") from None


def reverse_neg(w) -> CFWord:
    """-W-bar: reverse the word and negate every letter."""
    return CFWord(-a for a in reversed(w))


def drop_take(w, i: int, j: int) -> CFWord:
    """Remove i letters from the front and j from the back."""
    if i < 0 or j < 0 or i + j > len(w):
        raise WordError(f"cannot drop {i} and {j} letters from a word of length {len(w)}")
    return CFWord(w[i:len(w) - j])


@lru_cache(maxsize=None)
def gamma(k: int, p: int, r: int) -> CFWord:
    """Gamma_k, of length 2**(k+1) - 1."""
    _check(p, r)
    if k < 1:
        raise WordError("depth k must be >= 1")
    T = PolyT.T(p)
    if k == 1:
        return CFWord([-T, _mono(1, r, p), T])
    a = gamma(k - 1, p, r)
    src = k - 1
    out = []
    for j in range(1, 2 ** (k + 1)):
        if j % 2:
            i = (j + 1) // 2
            out.append(T if (i + src) % 2 == 0 else -T)
        elif j % 4 == 2:
            out.append(-_frob(a[(j + 2) // 2 - 2], r))
        else:
            out.append(_div_T2(_frob(a[j // 2 - 1], r), f"Gamma_{k} letter {j}"))
    return CFWord(out)


@lru_cache(maxsize=None)
def lambda_word(k: int, p: int, r: int) -> CFWord:
    """Lambda_k."""
    _check(p, r)
    T = PolyT.T(p)
    if k < 1:
        raise WordError("depth k must be >= 1")
    if k == 1:
        return CFWord([T + 1, T - 1])
    if k == 2:
        return CFWord([T, 1 - _mono(1, r, p), -T])
    mid = -_mono(1, exp_value("lambda", r, k - 1), p)
    return lambda_word(k - 2, p, r) + CFWord([mid]) + gamma(k - 2, p, r)


@lru_cache(maxsize=None)
def omega(k: int, p: int, r: int) -> CFWord:
    """Omega_k."""
    _check(p, r)
    if k < 1:
        raise WordError("depth k must be >= 1")
    if k == 1:
        return CFWord([-_mono(1, r - 2, p)])
    prev, lam = omega(k - 1, p, r), lambda_word(k - 1, p, r)
    mid = -_mono(1, exp_value("omega", r, k), p)
    return prev + lam + CFWord([mid]) + reverse_neg(lam) + reverse_neg(prev)


def _check_P(P: PolyT) -> None:
    if P.is_zero() or P.residue_at_zero() != 0:
        raise WordError(f"P must be a nonzero multiple of T (got {P})")


@lru_cache(maxsize=None)
def omega_p(P: PolyT, k: int, r: int) -> CFWord:
    """Omega_k(P); Omega_k(-T^(r-2)) coincides with Omega_k."""
    p = P.p
    _check(p, r)
    _check_P(P)
    if k < 1:
        raise WordError("depth k must be >= 1")
    if k == 1:
        return CFWord([P])
    prev, lam = omega_p(P, k - 1, r), lambda_word(k - 1, p, r)
    base = P.shift(-1)
    mid = _frob(base, r)
    for _ in range(k - 2):
        mid = _frob(mid, r)
    mid = mid.shift(exp_value("omega", r, k - 1))
    # the closing block is the plain -Omega_{k-1}-bar, whatever P is
    return prev + lam + CFWord([mid]) + reverse_neg(lam) + reverse_neg(omega(k - 1, p, r))


def omega_stream(p: int, r: int, P: PolyT | None = None) -> Iterator[PolyT]:
    """Letters of Omega_infinity (or Omega_infinity(P)), generated lazily.

    Each deepening checks that the new level extends the previous one.
    """
    _check(p, r)
    if P is not None:
        _check_P(P)

    def level(k: int) -> CFWord:
        return omega(k, p, r) if P is None else omega_p(P, k, r)

    done = CFWord()
    k = 1
    while True:
        cur = level(k)
        if cur[:len(done)] != done:
            bad = next(i for i, (a, b) in enumerate(zip(done, cur)) if a != b)
            raise PrefixViolation(f"level {k} rewrites letter {bad + 1}: {done[bad]} -> {cur[bad]}")
        yield from cur[len(done):]
        done = cur
        k += 1


def mahlergen_stream(seed, r: int) -> Iterator[PolyT]:
    """Letters a_1, a_2, ... generated from the seed a_1..a_l by

        a_{l+4k+1} = -a_{2k+1}^r / T^2,  a_{l+4k+2} = -T,
        a_{l+4k+3} = a_{2k+2}^r,         a_{l+4k+4} = T.

    Divisibility of a_{2k+1} by T is checked when each letter is needed.
    """
    seed = CFWord(seed)
    if not seed:
        raise WordError("empty seed")
    p = seed[0].p
    _check(p, r)
    for i, a in enumerate(seed, start=1):
        if a.degree < 1:
            raise WordError(f"seed letter {i} has degree < 1")
        if i % 2 == 1 and a.residue_at_zero() != 0:
            raise DivisibilityError(f"seed letter {i} = {a} is not divisible by T")
    T = PolyT.T(p)
    ell = len(seed)
    a = [None, *seed]  # 1-based
    yield from seed
    k = 0
    while True:
        src = a[2 * k + 1]
        if src.residue_at_zero() != 0:
            raise DivisibilityError(f"a_{2 * k + 1} = {src} is not divisible by T")
        a.append(-_div_T2(_frob(src, r), f"a_{ell + 4 * k + 1}"))
        a.append(-T)
        # with l = 1, a_{2k+2} is the letter appended just above
        a.append(_frob(a[2 * k + 2], r))
        a.append(T)
        yield from a[ell + 4 * k + 1:]
        k += 1
