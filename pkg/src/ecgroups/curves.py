"""Brute-force elliptic curves y^2 = x^3 + a x + b over small prime fields.

Point counts come from character sums, group structures from the exponent
(lcm of all point orders), and Rueck's list of admissible groups is built
independently from the factorization of the order so the two can be checked
against each other.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import FactoredInteger, factorize, is_prime, isqrt, jacobi
from .errors import PreconditionError
from .occurrence import GroupShape, _run

__all__ = [
    "CurveRecord",
    "RuckConstraint",
    "ec_point_count",
    "group_shape_of_curve",
    "curve_record",
    "ruck_constraint",
    "ruck_enumerate",
    "census",
    "MCount",
    "M_of_G",
    "aut_order",
    "ClRatio",
    "cohen_lenstra_ratio",
    "in_hasse_window",
]

CENSUS_BOUND = 499
AUT_BRUTE_LIMIT = 10**4


def in_hasse_window(N: int, p: int) -> bool:
    """Strict Hasse bound |p + 1 - N| < 2 sqrt(p), decided exactly."""
    return (p + 1 - N) ** 2 < 4 * p


def _check_curve(p: int, a: int, b: int) -> None:
    if p < 5 or not is_prime(p):
        raise PreconditionError(f"short Weierstrass curves need a prime p >= 5, got {p}")
    if not (0 <= a < p and 0 <= b < p):
        raise PreconditionError(f"coefficients ({a}, {b}) not reduced mod {p}")
    if (4 * a**3 + 27 * b**2) % p == 0:
        raise PreconditionError(f"singular curve y^2 = x^3 + {a}x + {b} over F_{p}")


@lru_cache(maxsize=None)
def _legendre_table(p: int) -> tuple[int, ...]:
    return tuple(jacobi(r, p) for r in range(p))


@lru_cache(maxsize=None)
def _sqrt_table(p: int) -> dict[int, tuple[int, ...]]:
    roots: dict[int, list[int]] = {}
    for y in range(p):
        roots.setdefault(y * y % p, []).append(y)
    return {r: tuple(ys) for r, ys in roots.items()}


def ec_point_count(p: int, a: int, b: int) -> int:
    """#E(F_p) = 1 + sum_x (1 + (x^3 + ax + b / p))."""
    _check_curve(p, a, b)
    chi = _legendre_table(p)
    return 1 + sum(1 + chi[(x * x * x + a * x + b) % p] for x in range(p))


def _add(P, Q, a: int, p: int):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def _mul(n: int, P, a: int, p: int):
    out = None
    while n:
        if n & 1:
            out = _add(out, P, a, p)
        P = _add(P, P, a, p)
        n >>= 1
    return out


def _point_order(P, N: FactoredInteger, a: int, p: int) -> int:
    order = N.n
    for ell, h in N:
        for _ in range(h):
            if _mul(order // ell, P, a, p) is None:
                order //= ell
            else:
                break
    return order


def _points(p: int, a: int, b: int) -> list[tuple[int, int]]:
    roots = _sqrt_table(p)
    return [(x, y) for x in range(p) for y in roots.get((x * x * x + a * x + b) % p, ())]


def _shape(p: int, a: int, b: int) -> GroupShape:
    pts = _points(p, a, b)
    N = factorize(len(pts) + 1)
    exponent = 1
    for P in pts:
        if _mul(exponent, P, a, p) is None:
            continue
        exponent = math.lcm(exponent, _point_order(P, N, a, p))
    m, rem = divmod(N.n, exponent)
    if rem or exponent % m:
        raise AssertionError(f"exponent {exponent} incompatible with order {N.n} on ({p}, {a}, {b})")
    shape = GroupShape(m, exponent // m)
    if shape.order != N.n:
        raise AssertionError(f"m^2 k != N for curve ({p}, {a}, {b})")
    return shape


def group_shape_of_curve(p: int, a: int, b: int) -> GroupShape:
    """The unique (m, k) with E(F_p) = Z/m x Z/mk, via the exponent of the group."""
    _check_curve(p, a, b)
    return _shape(p, a, b)


@dataclass(frozen=True)
class CurveRecord:
    p: int
    a: int
    b: int
    N: int
    trace: int
    shape: GroupShape


def curve_record(p: int, a: int, b: int) -> CurveRecord:
    N = ec_point_count(p, a, b)
    return CurveRecord(p, a, b, N, p + 1 - N, group_shape_of_curve(p, a, b))


# -- Rueck's admissible groups ---------------------------------------------------


@dataclass(frozen=True)
class RuckConstraint:
    """Allowed range 0..bound for the smaller l-exponent b_l, per prime l != p."""

    N: FactoredInteger
    p: int
    bounds: tuple[tuple[int, int], ...]
    p_exponent: int


def ruck_constraint(N: int, p: int) -> RuckConstraint:
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    if N < 1 or not in_hasse_window(N, p):
        raise PreconditionError(f"order {N} is outside the Hasse window of p = {p}")
    fN = factorize(N)
    fp1 = factorize(p - 1)
    bounds = tuple((ell, min(fp1.valuation(ell), h // 2)) for ell, h in fN if ell != p)
    return RuckConstraint(fN, p, bounds, fN.valuation(p))


def ruck_enumerate(N: int, p: int) -> set[GroupShape]:
    """Every group shape of order N that some curve over F_p can have."""
    rc = ruck_constraint(N, p)
    ms = [1]
    for ell, bound in rc.bounds:
        ms = [m * ell**b for m in ms for b in range(bound + 1)]
    return {GroupShape(m, N // (m * m)) for m in ms}


# -- census ---------------------------------------------------------------------


@lru_cache(maxsize=None)
def _orbits(p: int) -> tuple[tuple[int, int, int], ...]:
    """(a, b, orbit size) for each class of nonsingular (a, b) under (u^4 a, u^6 b)."""
    u4 = [pow(u, 4, p) for u in range(1, p)]
    u6 = [pow(u, 6, p) for u in range(1, p)]
    seen = np.zeros((p, p), dtype=bool)
    out = []
    for a in range(p):
        for b in range(p):
            if seen[a, b] or (4 * a**3 + 27 * b**2) % p == 0:
                continue
            orbit = {(s * a % p, t * b % p) for s, t in zip(u4, u6)}
            for x, y in orbit:
                seen[x, y] = True
            out.append((a, b, len(orbit)))
    return tuple(out)


def _shape_batch(p: int, reps: list[tuple[int, int, int]]) -> list[tuple[int, int, int]]:
    out = []
    for a, b, weight in reps:
        shape = _shape(p, a, b)
        out.append((shape.m, shape.k, weight))
    return out


def census(p: int, mode: str = "raw", workers: int = 1, bound: int = CENSUS_BOUND) -> dict[GroupShape, int]:
    """M_p(G) for every group G realised over F_p, sorted by shape.

    ``mode="raw"`` counts Weierstrass equations (a, b); ``mode="iso"`` counts
    F_p-isomorphism classes.  Isomorphic curves have isomorphic groups, so the
    structure is computed once per class.
    """
    if mode not in ("raw", "iso"):
        raise PreconditionError(f"census mode must be 'raw' or 'iso', got {mode!r}")
    if p < 5 or not is_prime(p):
        raise PreconditionError(f"census needs a prime p >= 5, got {p}")
    if p > bound:
        raise PreconditionError(f"census prime {p} exceeds the desk-scale bound {bound}")
    return dict(_census(p, mode, max(1, workers)))


@lru_cache(maxsize=None)
def _census_cached(p: int, mode: str) -> tuple[tuple[GroupShape, int], ...]:
    return _census(p, mode, 1)


def _census(p: int, mode: str, workers: int) -> tuple[tuple[GroupShape, int], ...]:
    reps = list(_orbits(p))
    n = max(1, min(workers, len(reps)))
    jobs = [(p, reps[i::n]) for i in range(n)]
    counts: Counter = Counter()
    for batch in _run(_shape_batch, jobs, workers):
        for m, k, w in batch:
            counts[GroupShape(m, k)] += w if mode == "raw" else 1
    return tuple(sorted(counts.items()))


@dataclass(frozen=True)
class MCount:
    """M(G) over the window primes p >= 5; ``censored`` marks windows reaching p = 2 or 3."""

    shape: GroupShape
    total: int
    censored: bool
    primes: tuple[int, ...]


def _window_primes(N: int) -> list[int]:
    r = isqrt(4 * N)
    return [p for p in range(max(2, N - r - 1), N + r + 3) if in_hasse_window(N, p) and is_prime(p)]


def M_of_G(shape: GroupShape, mode: str = "raw", bound: int = CENSUS_BOUND) -> MCount:
    """Sum of census counts of ``shape`` over all primes whose Hasse window holds its order."""
    N = shape.order
    primes = _window_primes(N)
    if primes and primes[-1] > bound:
        raise PreconditionError(f"window of order {N} reaches p = {primes[-1]} beyond census bound {bound}")
    used = tuple(p for p in primes if p >= 5)
    total = sum(dict(_census_cached(p, mode)).get(shape, 0) for p in used)
    return MCount(shape, total, any(p < 5 for p in primes), used)


# -- automorphisms ----------------------------------------------------------------


def _aut_ell_group(ell: int, exps: list[int]) -> int:
    """|Aut(Z/l^e1 x ... x Z/l^en)|, exponents ascending and positive (Hillar-Rhea)."""
    n = len(exps)
    total = 1
    for idx, e in enumerate(exps, start=1):
        d = max(i for i, x in enumerate(exps, start=1) if x == e)
        c = min(i for i, x in enumerate(exps, start=1) if x == e)
        total *= (ell**d - ell ** (idx - 1)) * ell ** (e * (n - d)) * ell ** ((e - 1) * (n - c + 1))
    return total


def _aut_closed(shape: GroupShape) -> int:
    fm = factorize(shape.m)
    total = 1
    for ell, h in factorize(shape.exponent):
        exps = [x for x in (fm.valuation(ell), h) if x > 0]
        total *= _aut_ell_group(ell, exps)
    return total


def _aut_brute(shape: GroupShape) -> int:
    m, e = shape.m, shape.exponent
    # all elements (y1, y2) of Z/m x Z/e
    y1, y2 = (a.ravel() for a in np.meshgrid(np.arange(m), np.arange(e), indexing="ij"))
    # the kernel is trivial iff it misses every line of the l-torsion, one probe per line
    probes = []
    for ell, _ in factorize(e):
        probes.append((0, e // ell))
        if m % ell == 0:
            probes.extend((m // ell, t * (e // ell)) for t in range(ell))
    # images (x1, x2) of the order-m generator must be killed by m
    x1, x2 = (a.ravel()[:, None] for a in np.meshgrid(np.arange(m), np.arange(0, e, e // math.gcd(e, m)), indexing="ij"))
    good = np.ones((x1.size, y1.size), dtype=bool)
    for i, j in probes:
        good &= ((i * x1 + j * y1) % m != 0) | ((i * x2 + j * y2) % e != 0)
    return int(good.sum())


def aut_order(shape: GroupShape, mode: str = "closed") -> int:
    """Order of the automorphism group of Z/m x Z/mk.

    ``mode="brute"`` counts pairs of generator images whose induced
    endomorphism kills no element of prime order; ``mode="closed"`` multiplies
    local automorphism counts of the l-primary parts.
    """
    if mode == "closed":
        return _aut_closed(shape)
    if mode == "brute":
        if shape.order > AUT_BRUTE_LIMIT:
            raise PreconditionError(f"brute-force automorphism count limited to order {AUT_BRUTE_LIMIT}")
        return _aut_brute(shape)
    raise PreconditionError(f"aut mode must be 'closed' or 'brute', got {mode!r}")


@dataclass(frozen=True)
class ClRatio:
    shape: GroupShape
    lhs: float
    rhs_unnormalized: float
    censored: bool


def cohen_lenstra_ratio(shape: GroupShape, mode: str = "raw") -> ClRatio:
    """M(G) log N / (4 sqrt N) next to (#G / #Aut G) N^(3/2); no constant is fitted."""
    N = shape.order
    mc = M_of_G(shape, mode)
    lhs = mc.total * math.log(N) / (4 * math.sqrt(N))
    rhs = N / aut_order(shape) * N**1.5
    return ClRatio(shape, lhs, rhs, mc.censored)
