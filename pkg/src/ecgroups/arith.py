"""Exact integer primitives: primality, sieving, factorization, Jacobi symbols.

Everything here works on Python ints in the range [0, 2**64); numpy is used
only for sieve bitmaps, never for arithmetic whose result is reported.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Iterator

import numpy as np

from .errors import PreconditionError

__all__ = [
    "FactoredInteger",
    "PrimeRange",
    "is_prime",
    "isqrt",
    "isqrt_array",
    "jacobi",
    "kronecker",
    "factorize",
    "primes_in",
    "prime_segments",
    "small_primes",
    "SEGMENT_ODDS",
]

LIMIT_64 = 1 << 64

# Number of odd integers covered by one sieve segment (the span is twice this).
SEGMENT_ODDS = 1 << 20

# Strong-probable-prime bases that admit no strong pseudoprime below 2**64
# (J. Sinclair's set).
_MR_BASES = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)

_TRIAL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61)

# primes_in switches from per-candidate tests to the sieve above this many candidates.
_DIRECT_CANDIDATES = 4096

_FACTOR_SEED = 0x5EED


def isqrt(n: int) -> int:
    """Floor of the square root of ``n`` by integer Newton iteration."""
    if n < 0:
        raise PreconditionError(f"isqrt of negative number {n}")
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + 1) // 2)
    while True:
        y = (x + n // x) >> 1
        if y >= x:
            return x
        x = y


def isqrt_array(values: np.ndarray) -> np.ndarray:
    """Elementwise floor square root of a nonnegative int64 array below 2**52."""
    values = np.asarray(values, dtype=np.int64)
    r = np.floor(np.sqrt(values.astype(np.float64))).astype(np.int64)
    # float sqrt is off by at most one here; two correction passes are plenty
    for _ in range(2):
        r -= (r * r > values).astype(np.int64)
        r += ((r + 1) * (r + 1) <= values).astype(np.int64)
    return r


def _strong_probable_prime(n: int, d: int, s: int, base: int) -> bool:
    a = base % n
    if a == 0:
        return True
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Deterministic primality for 0 <= n < 2**64."""
    if n < 2:
        return False
    if n >= LIMIT_64:
        raise PreconditionError(f"is_prime argument {n} is outside [0, 2**64)")
    for p in _TRIAL_PRIMES:
        if n % p == 0:
            return n == p
    if n < 61 * 61:
        return True
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    return all(_strong_probable_prime(n, d, s, b) for b in _MR_BASES)


@lru_cache(maxsize=None)
def _sieve_table(limit: int) -> np.ndarray:
    table = np.ones(limit + 1, dtype=bool)
    table[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if table[p]:
            table[p * p :: p] = False
    table.setflags(write=False)
    return table


def small_primes(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (cached, read-only)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    # round up so repeated calls share a handful of cached tables
    size = 1 << max(10, (limit).bit_length())
    primes = _primes_from_table(size)
    return primes[: np.searchsorted(primes, limit, side="right")]


@lru_cache(maxsize=None)
def _primes_from_table(size: int) -> np.ndarray:
    primes = np.flatnonzero(_sieve_table(size)).astype(np.int64)
    primes.setflags(write=False)
    return primes


def prime_segments(lo: int, hi: int, span: int = 2 * SEGMENT_ODDS) -> Iterator[tuple[int, np.ndarray]]:
    """Segmented sieve over the half-open range [lo, hi).

    Yields ``(start, mask)`` pairs where ``mask[i]`` tells whether
    ``start + i`` is prime; consecutive segments tile the range.
    """
    lo = max(lo, 0)
    if hi <= lo:
        return
    if hi > 1 << 62:
        raise PreconditionError("segmented sieve limited to ranges below 2**62")
    base = small_primes(isqrt(hi - 1))
    start = lo
    while start < hi:
        stop = min(start + span, hi)
        mask = np.ones(stop - start, dtype=bool)
        if start < 2:
            mask[: 2 - start] = False
        for p in base:
            p = int(p)
            pp = p * p
            if pp >= stop:
                break
            first = max(pp, -(-start // p) * p)
            mask[first - start :: p] = False
        yield start, mask
        start = stop


@dataclass(frozen=True)
class PrimeRange:
    """Open interval (lo, hi) restricted to the residue class a mod q."""

    lo: int
    hi: int
    q: int = 1
    a: int = 0

    def __post_init__(self):
        if self.q < 1:
            raise PreconditionError(f"modulus must be >= 1, got {self.q}")
        if not 0 <= self.a < self.q:
            raise PreconditionError(f"residue {self.a} not in [0, {self.q})")
        if self.q > 1 and math.gcd(self.a, self.q) != 1:
            raise PreconditionError(f"gcd({self.a}, {self.q}) != 1")
        if self.hi > LIMIT_64:
            raise PreconditionError("upper bound exceeds 2**64")
        if self.hi < self.lo:
            raise PreconditionError(f"empty range ({self.lo}, {self.hi}) has hi < lo")


def primes_in(lo: int | PrimeRange, hi: int | None = None, q: int = 1, a: int = 0) -> list[int]:
    """Primes p with lo < p < hi and p = a (mod q), ascending.

    Accepts either a :class:`PrimeRange` or the four fields directly.
    """
    rng = lo if isinstance(lo, PrimeRange) else PrimeRange(lo, hi, q, a)
    first = rng.lo + 1
    first += (rng.a - first) % rng.q
    last = rng.hi - 1
    if last < first:
        return []
    n_candidates = (last - first) // rng.q + 1
    if n_candidates <= _DIRECT_CANDIDATES or last >= 1 << 52:
        return [n for n in range(first, last + 1, rng.q) if is_prime(n)]
    out: list[int] = []
    for start, mask in prime_segments(first, last + 1):
        offset = (rng.a - start) % rng.q
        hits = np.flatnonzero(mask[offset :: rng.q]) * rng.q + offset + start
        out.extend(hits.tolist())
    return out


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1, via quadratic reciprocity."""
    if n < 1 or not n & 1:
        raise PreconditionError(f"Jacobi symbol needs odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while not a & 1:
            a >>= 1
            if n & 7 in (3, 5):
                result = -result
        a, n = n, a
        if a & 3 == 3 and n & 3 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for n >= 1, extending Jacobi with the (a/2) rule."""
    if n < 1:
        raise PreconditionError(f"Kronecker symbol needs positive n, got {n}")
    v = (n & -n).bit_length() - 1
    odd = n >> v
    if v and not a & 1:
        return 0
    two = 1 if a % 8 in (1, 7) else -1
    return (two if v & 1 else 1) * jacobi(a, odd)


@dataclass(frozen=True)
class FactoredInteger:
    """A positive integer with its prime factorization in increasing prime order."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        primes = [p for p, _ in self.factors]
        if primes != sorted(set(primes)):
            raise PreconditionError("factor list must be strictly increasing")
        if any(e < 1 for _, e in self.factors):
            raise PreconditionError("exponents must be >= 1")
        if reduce(lambda acc, pe: acc * pe[0] ** pe[1], self.factors, 1) != self.n:
            raise PreconditionError(f"factors do not recompose to {self.n}")

    def __iter__(self):
        return iter(self.factors)

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def valuation(self, ell: int) -> int:
        for p, e in self.factors:
            if p == ell:
                return e
        return 0

    def mobius(self) -> int:
        if any(e > 1 for _, e in self.factors):
            return 0
        return -1 if len(self.factors) & 1 else 1

    def totient(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= (p - 1) * p ** (e - 1)
        return out

    def num_divisors(self) -> int:
        out = 1
        for _, e in self.factors:
            out *= e + 1
        return out

    def von_mangoldt(self) -> float:
        return math.log(self.factors[0][0]) if len(self.factors) == 1 else 0.0

    def divisors(self) -> list[int]:
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**i for d in divs for i in range(e + 1)]
        return sorted(divs)


def _brent(n: int, rng: random.Random) -> int:
    """Return a nontrivial factor of the odd composite n (Pollard rho, Brent's cycle)."""
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        batch = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(batch, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += batch
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int) -> FactoredInteger:
    """Complete factorization of 1 <= n < 2**64."""
    if n < 1:
        raise PreconditionError(f"factorize needs n >= 1, got {n}")
    if n >= LIMIT_64:
        raise PreconditionError(f"factorize argument {n} is outside [1, 2**64)")
    counts: dict[int, int] = {}
    m = n
    for p in small_primes(1000):
        p = int(p)
        if p * p > m:
            break
        while m % p == 0:
            counts[p] = counts.get(p, 0) + 1
            m //= p
    rng = random.Random(_FACTOR_SEED)
    stack = [m] if m > 1 else []
    while stack:
        x = stack.pop()
        if is_prime(x):
            counts[x] = counts.get(x, 0) + 1
            continue
        r = isqrt(x)
        if r * r == x:
            stack += [r, r]
            continue
        d = _brent(x, rng)
        stack += [d, x // d]
    return FactoredInteger(n, tuple(sorted(counts.items())))
