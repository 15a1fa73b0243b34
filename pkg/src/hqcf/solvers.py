"""The concrete series of each family as certified Laurent series.

Every family except the Mahler series is obtained as the fixed point of a
map that is strictly contracting for the 1/T-adic valuation, so the
iteration stops as soon as two successive iterates agree down to the target
precision.  The Mahler series is summed directly.

Families
    mahler       Theta_r = sum_k T^(-r^k)
    baum_sweet   root of T X^(r+1) + X - T = 0
    general_p    z = [P, T+1, T-1, z_4] with T^2 z^(r+1) = (P T^2 + T - 1) z^r + 1
    mahlergen    z = [a_1..a_l, z_{l+1}] with z^r = -T^2 z_{l+1} - T
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from itertools import chain, islice
from typing import Callable, Iterator

from hqcf.algebra import CFWord, PolyT, RatFuncT, check_prime, fold_rational
from hqcf.contfrac import ExpansionResult, cf_expand, complete_quotient, fold
from hqcf.laurent import LaurentSeries, series_from_ratfunc
from hqcf.words import mahlergen_stream, omega_stream

FAMILIES = ("mahler", "baum_sweet", "general_p", "mahlergen")

DEFAULT_MAX_PREC = 1 << 25


class SolverError(ArithmeticError):
    """The fixed-point iteration or a post-condition failed."""


class PrecisionCapExceeded(SolverError):
    """The auto-precision loop hit its cap before certifying enough quotients."""


def max_prec() -> int:
    raw = os.environ.get("HQCF_MAX_PREC")
    if raw is None:
        return DEFAULT_MAX_PREC
    value = int(raw)
    if value <= 0:
        raise ValueError("HQCF_MAX_PREC must be a positive integer")
    return value


@dataclass(frozen=True)
class SolveRequest:
    family: str
    p: int
    t: int
    target_prec: int
    P: PolyT | None = None
    seed: CFWord | None = None
    r: int = field(init=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        check_prime(self.p)
        if self.t < 1:
            raise ValueError("t must be >= 1")
        object.__setattr__(self, "r", self.p ** self.t)
        if self.r <= 2:
            raise ValueError(f"r>2 required (r = {self.r})")
        if self.target_prec >= 0:
            raise ValueError("target_prec must be negative")
        if self.family == "general_p":
            if self.P is None or self.P.is_zero() or self.P.residue_at_zero() != 0:
                raise ValueError("general_p needs a nonzero P divisible by T")
            if self.P.p != self.p:
                raise ValueError("P lives over a different prime")
        if self.family == "mahlergen":
            if not self.seed:
                raise ValueError("mahlergen needs a nonempty seed")
            for i, a in enumerate(self.seed, start=1):
                if a.p != self.p or a.degree < 1:
                    raise ValueError(f"seed letter {i} must be a polynomial of degree >= 1 over F_{self.p}")
                if i % 2 == 1 and a.residue_at_zero() != 0:
                    raise ValueError(f"seed letter {i} must be divisible by T")

    def at(self, target_prec: int) -> "SolveRequest":
        return SolveRequest(self.family, self.p, self.t, target_prec, self.P, self.seed)


def iteration_cap(target_prec: int, r: int) -> int:
    return 4 + math.ceil(abs(target_prec) / (r - 2))


def _fixed_point(F: Callable[[LaurentSeries], LaurentSeries], x: LaurentSeries,
                 target: int, r: int, name: str) -> LaurentSeries:
    x = x.truncate(target)
    last = None
    for _ in range(iteration_cap(target, r)):
        y = F(x)
        if y.prec > target:
            raise SolverError(f"{name}: iterate only certified to T^{y.prec}, need T^{target}")
        y = y.truncate(target)
        diff = y - x
        if diff.is_zero_so_far():
            return y
        if last is not None and diff.top >= last:
            raise SolverError(f"{name}: iteration is not contracting (difference degree {diff.top} after {last})")
        last = diff.top
        x = y
    raise SolverError(f"{name}: no convergence within {iteration_cap(target, r)} iterations")


def mahler_theta(req: SolveRequest, start: LaurentSeries | None = None) -> LaurentSeries:
    """Theta_r summed down to the target precision."""
    terms, e = {}, -1
    while e >= req.target_prec:
        terms[e] = 1
        e *= req.r
    return LaurentSeries.from_terms(terms, req.target_prec, req.p)


def solve_bs(req: SolveRequest, start: LaurentSeries | None = None) -> LaurentSeries:
    """X <- T/(T X^r + 1) from X_0 = 1 (or ``start``)."""
    p, r = req.p, req.r
    T = PolyT.T(p)
    target = req.target_prec
    x0 = start if start is not None else LaurentSeries.from_poly(PolyT.const(1, p), target)

    def F(x):
        return (x.frobenius(r, target) * T + 1).inverse() * T

    return _fixed_point(F, x0, req.target_prec, r, "baum_sweet")


def _general_head(req: SolveRequest) -> RatFuncT:
    T = PolyT.T(req.p)
    return RatFuncT(req.P * T * T + T - 1, T * T)


def solve_general(req: SolveRequest, start: LaurentSeries | None = None) -> LaurentSeries:
    """z <- (P T^2 + T - 1)/T^2 + 1/(T^2 z^r) from the rational head."""
    p, r = req.p, req.r
    head = _general_head(req)
    target = req.target_prec
    x0 = start if start is not None else series_from_ratfunc(head, target)

    def F(z):
        return z.frobenius(r, target).shift(2).inverse() + head

    return _fixed_point(F, x0, req.target_prec, r, "general_p")


def solve_mahlergen(req: SolveRequest, start: LaurentSeries | None = None) -> LaurentSeries:
    """z <- [seed, -(z^r + T)/T^2] from the value of the seed alone."""
    p, r = req.p, req.r
    T = PolyT.T(p)
    seed = req.seed
    target = req.target_prec
    x0 = start if start is not None else series_from_ratfunc(fold_rational(seed), target)

    def F(z):
        return fold(seed, -(z.frobenius(r, target) + T).shift(-2))

    return _fixed_point(F, x0, req.target_prec, r, "mahlergen")


SOLVERS = {
    "mahler": mahler_theta,
    "baum_sweet": solve_bs,
    "general_p": solve_general,
    "mahlergen": solve_mahlergen,
}


def solve(req: SolveRequest, start: LaurentSeries | None = None) -> LaurentSeries:
    return SOLVERS[req.family](req, start)


# defining equations

def residual(req: SolveRequest, z: LaurentSeries) -> tuple[LaurentSeries, int]:
    """The defining equation evaluated at z, and the documented precision slack.

    The residual is certified down to target_prec + slack, where slack is the
    degree lost by multiplying z by the other factors of the leading term:
    1 for mahler and baum_sweet (a factor T), r*deg(P) + 2 for general_p
    (T^2 z^r), and 2*(deg a_2 + ... + deg a_{l+1}) + 2 for mahlergen, where
    the tail z_{l+1} is recovered by l inversions.
    """
    p, r = req.p, req.r
    T = PolyT.T(p)
    # nothing below the target can survive in the residual window
    zr = z.frobenius(r, req.target_prec - 1)
    if req.family == "mahler":
        return zr * T - z * T + 1, 1
    if req.family == "baum_sweet":
        return zr * z * T + z - T, 1
    if req.family == "general_p":
        lhs = (zr * z).shift(2)
        rhs = zr * (req.P * T * T + T - 1) + 1
        return lhs - rhs, r * req.P.degree + 2
    seed = req.seed
    tail = complete_quotient(z, seed)
    degs = [a.degree for a in seed[1:]] + [r * seed[0].degree - 2]
    return zr + tail.shift(2) + T, 2 * sum(degs) + 2


def check_residual(req: SolveRequest, z: LaurentSeries) -> LaurentSeries:
    res, slack = residual(req, z)
    if not res.is_zero_so_far():
        raise SolverError(f"{req.family}: residual has a nonzero term at T^{res.top}")
    if res.prec > req.target_prec + slack:
        raise SolverError(f"{req.family}: residual certified only to T^{res.prec}, "
                          f"expected T^{req.target_prec + slack}")
    return res


# predicted quotient streams

def predicted_stream(family: str, p: int, r: int, P: PolyT | None = None,
                     seed: CFWord | None = None) -> Iterator[PolyT]:
    """Closed-form partial quotients a_0, a_1, ... of the family's series."""
    T = PolyT.T(p)
    if family == "mahler":
        return chain([PolyT.zero(p)], mahlergen_stream([T], r))
    if family == "baum_sweet":
        return chain([PolyT.const(1, p), -T - 1], omega_stream(p, r))
    if family == "general_p":
        return omega_stream(p, r, P)
    if family == "mahlergen":
        return mahlergen_stream(seed, r)
    raise ValueError(f"unknown family {family!r}")


def predicted(req: SolveRequest, n: int) -> CFWord:
    return CFWord(islice(predicted_stream(req.family, req.p, req.r, req.P, req.seed), n))


# auto-precision expansion

@dataclass(frozen=True)
class CertifiedExpansion:
    letters: CFWord
    series: LaurentSeries
    target_prec: int


def expand_family(req: SolveRequest, n: int, cap: int | None = None) -> CertifiedExpansion:
    """Solve at growing precision until n quotients are certified.

    Starts at 64*n, doubles each round, and warm-starts every solve from the
    previous root.  Raises PrecisionCapExceeded past ``cap`` (default from
    HQCF_MAX_PREC).
    """
    cap = max_prec() if cap is None else cap
    prec = -64 * max(n, 1)
    start = None
    while True:
        if -prec > cap:
            raise PrecisionCapExceeded(f"{n} quotients need more than {cap} terms of precision")
        r_req = req.at(prec)
        z = solve(r_req, start)
        check_residual(r_req, z)
        res: ExpansionResult = cf_expand(z, n)
        if res.certified >= n or res.complete:
            return CertifiedExpansion(res.letters, z, prec)
        start = z
        prec *= 2
        if -prec > cap >= -prec // 2:
            prec = -cap


def check_general_prefix(req: SolveRequest, z: LaurentSeries) -> None:
    """z = [P, T+1, T-1, z_4] with z^r = T^2 z_4 + T + 1 on the certified window."""
    T = PolyT.T(req.p)
    head = CFWord([req.P, T + 1, T - 1])
    got = cf_expand(z, 3).letters
    if got != head:
        raise SolverError(f"general_p: expansion starts {got}, expected {head}")
    z4 = complete_quotient(z, head)
    rel = z.frobenius(req.r, z.prec - 1) - z4.shift(2) - (T + 1)
    if not rel.is_zero_so_far():
        raise SolverError(f"general_p: z^r - T^2 z_4 - T - 1 has a term at T^{rel.top}")
