"""Sieve quantities for the family k m^2 + j m + 1 and the quadratic characters (-d / .).

Real-valued products are accumulated as sums of logarithms with
``math.fsum``; the order of accumulation is fixed so results are bit-stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .arith import factorize, isqrt, jacobi, kronecker, prime_segments, small_primes
from .errors import PreconditionError
from .occurrence import count_S

__all__ = [
    "RhoSpec",
    "CharacterSpec",
    "SieveInstance",
    "DiscrepancyQuery",
    "rho",
    "sieve_survivors",
    "legendre_identity_count",
    "sieve_main_term",
    "euler_product",
    "l1_reference",
    "fundamental_discriminant",
    "character",
    "T_sum",
    "psi_discrepancy",
    "theorem_ratios",
]


@dataclass(frozen=True)
class RhoSpec:
    """Root counts of k c^2 + j c + 1 modulo d."""

    k: int
    j: int

    def __post_init__(self):
        if self.k < 1:
            raise PreconditionError(f"k must be positive, got {self.k}")

    @property
    def discriminant(self) -> int:
        return self.j * self.j - 4 * self.k

    def value(self, c: int) -> int:
        return self.k * c * c + self.j * c + 1


def _rho_prime(spec: RhoSpec, ell: int) -> int:
    if ell == 2:
        return 1 if (spec.k - spec.j) & 1 else 0
    if spec.k % ell == 0:
        return 0 if spec.j % ell == 0 else 1
    return 1 + jacobi(spec.discriminant, ell)


def _rho_brute(spec: RhoSpec, d: int) -> int:
    c = np.arange(d, dtype=np.int64)
    return int(np.count_nonzero((spec.k * c % d * c + spec.j * c + 1) % d == 0))


def rho(spec: RhoSpec, d: int, method: str = "auto") -> int:
    """Number of c mod d with k c^2 + j c + 1 = 0 (mod d).

    ``method="formula"`` multiplies the closed-form prime values and needs a
    squarefree d; ``"brute"`` counts roots directly; ``"auto"`` picks the
    formula whenever d is squarefree.
    """
    if d < 1:
        raise PreconditionError(f"modulus must be positive, got {d}")
    if method not in ("auto", "formula", "brute"):
        raise PreconditionError(f"unknown rho method {method!r}")
    if method == "brute":
        return _rho_brute(spec, d)
    fd = factorize(d)
    if fd.mobius() == 0:
        if method == "formula":
            raise PreconditionError(f"formula path needs squarefree d, got {d}")
        return _rho_brute(spec, d)
    out = 1
    for ell, _ in fd:
        out *= _rho_prime(spec, ell)
    return out


@dataclass(frozen=True)
class SieveInstance:
    """The set {k m^2 + j m + 1 : 1 <= m <= M}."""

    k: int
    j: int
    M: int

    def __post_init__(self):
        RhoSpec(self.k, self.j)
        if self.M < 0:
            raise PreconditionError(f"M must be nonnegative, got {self.M}")

    @property
    def rho_spec(self) -> RhoSpec:
        return RhoSpec(self.k, self.j)

    def values(self) -> np.ndarray:
        if self.k * self.M * self.M + abs(self.j) * self.M + 1 >= 1 << 63:
            raise PreconditionError("sieve values overflow 64-bit integers")
        m = np.arange(1, self.M + 1, dtype=np.int64)
        return self.k * m * m + self.j * m + 1


def sieve_survivors(inst: SieveInstance, y: int) -> int:
    """Count of m <= M whose value has no prime factor <= y, by trial division."""
    vals = np.abs(inst.values())
    alive = np.ones(vals.size, dtype=bool)
    for ell in small_primes(y).tolist():
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        alive[idx[vals[idx] % ell == 0]] = False
    return int(alive.sum())


def legendre_identity_count(inst: SieveInstance, y: int) -> int:
    """sum over d | P(y) of mu(d) * #{m <= M : d | value(m)}."""
    vals = inst.values()
    primes = small_primes(y).tolist()
    total = 0
    for r in range(len(primes) + 1):
        for combo in combinations(primes, r):
            d = math.prod(combo)
            total += (-1) ** r * int(np.count_nonzero(vals % d == 0))
    return total


def sieve_main_term(inst: SieveInstance, y: int) -> float:
    """M * prod_{l <= y} (1 - rho(l) / l)."""
    terms = []
    spec = inst.rho_spec
    for ell in small_primes(y).tolist():
        r = _rho_prime(spec, ell)
        if r > min(2, ell - 1):
            raise PreconditionError(f"rho({ell}) = {r} exceeds min(2, {ell} - 1)")
        terms.append(math.log1p(-r / ell))
    return inst.M * math.exp(math.fsum(terms))


# -- quadratic characters ----------------------------------------------------------


@dataclass(frozen=True)
class CharacterSpec:
    """The Kronecker character (-d / .) with -d = -a^2 d1, d1 the conductor.

    ``a`` is a Fraction: when d1 = 4s it can be half an odd integer.
    """

    d: int
    d1: int
    a: Fraction

    def value(self, n: int) -> int:
        return kronecker(-self.d, n)

    def primitive_value(self, n: int) -> int:
        return kronecker(-self.d1, n)

    def odd_table(self) -> np.ndarray:
        """chi(n) for odd n, indexed by n mod 4d (Jacobi symbols are periodic there)."""
        period = 4 * self.d
        table = np.zeros(period, dtype=np.int8)
        for r in range(1, period, 2):
            table[r] = jacobi(-self.d, r)
        return table


def fundamental_discriminant(d: int) -> tuple[int, Fraction]:
    """(d1, a) with d1 the absolute fundamental discriminant of Q(sqrt(-d)) and d = a^2 d1."""
    if d < 1:
        raise PreconditionError(f"d must be positive, got {d}")
    s = 1
    for ell, h in factorize(d):
        if h & 1:
            s *= ell
    d1 = s if s % 4 == 3 else 4 * s
    ratio = Fraction(d, d1)
    a = Fraction(isqrt(ratio.numerator), isqrt(ratio.denominator))
    return d1, a


def character(d: int) -> CharacterSpec:
    d1, a = fundamental_discriminant(d)
    return CharacterSpec(d, d1, a)


def _log_terms(chi: CharacterSpec, lo: int, hi: int) -> list[float]:
    """Per-segment fsums of log(1 - chi(l)/l) over primes lo < l <= hi."""
    table = chi.odd_table()
    partials = []
    if lo < 2 <= hi:
        partials.append(math.log1p(-chi.value(2) / 2))
    for start, mask in prime_segments(max(lo + 1, 3), hi + 1):
        ells = np.flatnonzero(mask) + start
        vals = table[ells % (4 * chi.d)].astype(np.float64)
        partials.append(math.fsum(np.log1p(-vals / ells).tolist()))
    return partials


def euler_product(chi: CharacterSpec | int, y: int, y0: int = 0) -> float:
    """prod over primes y0 < l <= y of (1 - chi(l) / l) for chi = (-d / .)."""
    if not isinstance(chi, CharacterSpec):
        chi = character(chi)
    if y > 10**9:
        raise PreconditionError("euler_product limited to y <= 10**9")
    if y <= y0:
        return 1.0
    return math.exp(math.fsum(_log_terms(chi, y0, y)))


def l1_reference(d: int, terms: int = 10**7) -> float:
    """L(1, (-d/.)) as the plain series sum chi(n)/n over whole periods.

    Character values come straight from the Kronecker symbol on one period
    of length 4d; the truncation error is O(d / terms).
    """
    period = 4 * d
    chi = np.array([kronecker(-d, r) for r in range(1, period + 1)], dtype=np.float64)
    reps = max(1, terms // period)
    n = np.arange(1, reps * period + 1, dtype=np.float64)
    series = np.tile(chi, reps) / n
    return math.fsum(series.tolist())


def T_sum(d: int, K: int, exact: bool = False) -> float | Fraction:
    """Sum of k / phi(k) over integer pairs (k, j), j of either sign, with j^2 + d = 4k <= 4K."""
    if d < 1 or K < 1:
        raise PreconditionError("T_sum needs d >= 1 and K >= 1")
    if d > 4 * K:
        raise PreconditionError(f"T_sum needs d <= 4K, got d = {d}, K = {K}")
    total = Fraction(0)
    jmax = isqrt(4 * K - d)
    for j in range(-jmax, jmax + 1):
        num = j * j + d
        if num % 4:
            continue
        k = num // 4
        total += Fraction(k, factorize(k).totient())
    return total if exact else float(total)


@dataclass(frozen=True)
class DiscrepancyQuery:
    y: float
    h: float
    q: int = 1
    a: int = 0

    def __post_init__(self):
        if self.q < 1:
            raise PreconditionError(f"modulus must be >= 1, got {self.q}")
        if self.h < 0 or self.y < 0:
            raise PreconditionError("y and h must be nonnegative")
        if self.q > 1 and math.gcd(self.a, self.q) != 1:
            raise PreconditionError(f"gcd({self.a}, {self.q}) != 1")
        if self.y + self.h > 10**10:
            raise PreconditionError("psi discrepancy limited to y + h <= 10**10")


def _psi_interval(lo: int, hi: int, q: int, a: int) -> float:
    """sum of Lambda(n) over lo < n <= hi with n = a (mod q)."""
    partials = []
    a %= q
    first = lo + 1 + (a - lo - 1) % q
    for start, mask in prime_segments(first, hi + 1):
        offset = (a - start) % q
        ells = np.flatnonzero(mask[offset::q]) * q + offset + start
        if ells.size:
            partials.append(math.fsum(np.log(ells.astype(np.float64)).tolist()))
    for ell in small_primes(isqrt(hi)).tolist():
        pk = ell * ell
        while pk <= hi:
            if pk > lo and pk % q == a:
                partials.append(math.log(ell))
            pk *= ell
    return math.fsum(partials)


def psi_discrepancy(query: DiscrepancyQuery) -> float:
    """|psi(y + h; q, a) - psi(y; q, a) - h / phi(q)|."""
    lo = math.floor(query.y)
    hi = math.floor(query.y + query.h)
    phi = factorize(query.q).totient()
    return abs(_psi_interval(lo, hi, query.q, query.a) - query.h / phi)


def theorem_ratios(M: int, K: int, strategy: str = "auto", workers: int = 1) -> dict[str, float]:
    """#S(M,K) normalised three ways: by M K^{3/2} / log M, and twice by M K."""
    count = count_S(M, K, strategy, workers).count
    return {
        "count": count,
        "thm12": count * math.log(M) / (M * K**1.5),
        "thm13_density": count / (M * K),
        "thm14_ratio": count / (M * K),
    }
