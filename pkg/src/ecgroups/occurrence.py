"""Occurrence of G_{m,k} = Z/m x Z/mk as a group of points over a prime field.

G_{m,k} occurs iff some prime p = k*m^2 + j*m + 1 has j^2 < 4k.  This module
decides that per pair, and counts the occurring pairs in a box
[1, M] x [1, K] by two independent routes:

* ``direct`` walks every pair and tests window candidates for primality;
* ``prime_driven`` sieves the primes once and, for every modulus m, marks the
  k whose window contains a prime p = 1 (mod m).

All window comparisons are integer-exact.  For an order n and a prime p,
``(p - 1 - n)**2 - 4*n == (p + 1 - n)**2 - 4*p`` identically, so n lies in the
window of p iff ``|p + 1 - n| <= isqrt(4*p - 1)``.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .arith import factorize, is_prime, isqrt, isqrt_array, prime_segments, SEGMENT_ODDS
from .errors import MemoryBudgetError, PreconditionError

__all__ = [
    "GroupShape",
    "SearchWindow",
    "OccurrenceResult",
    "CountReport",
    "occurs",
    "shapes_for_prime",
    "occurrence_table",
    "count_S",
    "count_R",
    "density_scan",
    "memory_budget",
]

INT_DOMAIN = 1 << 63
DEFAULT_MEM_BUDGET = 2 << 30
AUTO_MIN_BOX = 1 << 16
# prime_driven needs every prime up to about M^2 K; auto refuses beyond this.
AUTO_MAX_SIEVE = 1 << 32
STRATEGIES = ("direct", "prime_driven", "auto")


def memory_budget() -> int:
    raw = os.environ.get("ECG_MEM_BUDGET_BYTES")
    return int(raw) if raw else DEFAULT_MEM_BUDGET


@dataclass(frozen=True, order=True)
class GroupShape:
    """The group Z/m x Z/mk of order m^2 k."""

    m: int
    k: int

    def __post_init__(self):
        if self.m < 1 or self.k < 1:
            raise PreconditionError(f"group shape needs m, k >= 1, got ({self.m}, {self.k})")
        if self.order >= INT_DOMAIN:
            raise PreconditionError(f"order m^2 k of ({self.m}, {self.k}) exceeds 2**63")

    @property
    def order(self) -> int:
        return self.m * self.m * self.k

    @property
    def exponent(self) -> int:
        return self.m * self.k


@dataclass(frozen=True)
class SearchWindow:
    """Primes p = 1 (mod m) in the open interval (km^2 - 2m sqrt(k) + 1, km^2 + 2m sqrt(k) + 1)."""

    m: int
    k: int

    def __post_init__(self):
        GroupShape(self.m, self.k)
        if self.upper >= INT_DOMAIN:
            raise PreconditionError(f"search window of ({self.m}, {self.k}) leaves the 2**63 domain")

    @property
    def j_bound(self) -> int:
        """Largest |j| with j^2 < 4k."""
        return isqrt(4 * self.k - 1)

    @property
    def upper(self) -> int:
        return self.k * self.m * self.m + self.j_bound * self.m + 1

    def __contains__(self, p: int) -> bool:
        n = self.k * self.m * self.m
        return (p - 1) % self.m == 0 and (p - 1 - n) ** 2 < 4 * n

    def candidates(self) -> list[tuple[int, int]]:
        """All (n, j) with n = km^2 + jm + 1, j^2 < 4k and n >= 2, ascending in j."""
        base = self.k * self.m * self.m + 1
        jb = self.j_bound
        return [(base + j * self.m, j) for j in range(-jb, jb + 1) if base + j * self.m >= 2]


@dataclass(frozen=True)
class OccurrenceResult:
    shape: GroupShape
    occurs: bool
    witnesses: tuple[tuple[int, int], ...] = ()


@dataclass
class CountReport:
    M: int
    K: int
    count: int
    strategy: str
    elapsed: float
    per_m: list[int] = field(default_factory=list, repr=False)
    per_k: list[int] = field(default_factory=list, repr=False)


def occurs(m: int, k: int, want_witnesses: bool = False) -> OccurrenceResult:
    """Decide whether G_{m,k} is the group of points of some curve over a prime field.

    With ``want_witnesses`` every witness (p, j) is returned; otherwise the scan
    stops at the first prime.
    """
    window = SearchWindow(m, k)
    found = []
    for n, j in window.candidates():
        if is_prime(n):
            found.append((n, j))
            if not want_witnesses:
                break
    return OccurrenceResult(GroupShape(m, k), bool(found), tuple(found))


def _k_range(p: int, m2: int) -> tuple[int, int]:
    s = isqrt(4 * p - 1)
    return max(1, -(-(p + 1 - s) // m2)), (p + 1 + s) // m2


def shapes_for_prime(p: int, M: int) -> list[GroupShape]:
    """All (m, k) with m <= M, m | p - 1 and p inside the window of (m, k)."""
    if p < 2 or p >= INT_DOMAIN:
        raise PreconditionError(f"prime {p} outside [2, 2**63)")
    out = []
    for m in factorize(p - 1).divisors():
        if m > M:
            break
        lo, hi = _k_range(p, m * m)
        out.extend(GroupShape(m, k) for k in range(lo, hi + 1))
    return out


# -- box counting --------------------------------------------------------------


def _direct_rows(m_lo: int, m_hi: int, k_lo: int, K: int) -> np.ndarray:
    table = np.zeros((m_hi - m_lo + 1, K - k_lo + 1), dtype=bool)
    bounds = [isqrt(4 * k - 1) for k in range(k_lo, K + 1)]
    for row, m in enumerate(range(m_lo, m_hi + 1)):
        m2 = m * m
        for col, jb in enumerate(bounds):
            base = (k_lo + col) * m2 + 1
            for j in range(-jb, jb + 1):
                n = base + j * m
                if n >= 2 and is_prime(n):
                    table[row, col] = True
                    break
    return table


def _p_range(m: np.ndarray, k_lo: int, K: int) -> tuple[np.ndarray, np.ndarray]:
    # loose prime bounds per modulus; the exact window test happens later
    lo = m * m * k_lo - 2 * m * (isqrt(k_lo) + 1)
    hi = m * m * K + 2 * m * (isqrt(K) + 1) + 1
    return np.maximum(lo, 2), hi


def _prime_driven_chunk(lo: int, hi: int, m_lo: int, M: int, k_lo: int, K: int) -> np.ndarray:
    """Window-hit difference array for primes in [lo, hi), rows m_lo..M, columns k_lo..K+1."""
    width = K - k_lo + 2
    diff = np.zeros((M - m_lo + 1, width), dtype=np.int32)
    ms = np.arange(m_lo, M + 1, dtype=np.int64)
    p_lo, p_hi = _p_range(ms, k_lo, K)
    for start, mask in prime_segments(lo, hi):
        stop = start + len(mask)
        live = np.flatnonzero((p_lo < stop) & (p_hi >= start))
        for row in live.tolist():
            m = m_lo + row
            first = max(start, int(p_lo[row]))
            first += (1 - first) % m
            last = min(stop - 1, int(p_hi[row]))
            if first > last:
                continue
            cand = np.arange(first, last + 1, m, dtype=np.int64)
            primes = cand[mask[cand - start]]
            if primes.size == 0:
                continue
            s = isqrt_array(4 * primes - 1)
            m2 = m * m
            klo = np.maximum(-((s - primes - 1) // m2), k_lo)
            khi = np.minimum((primes + 1 + s) // m2, K)
            ok = klo <= khi
            if not ok.any():
                continue
            diff[row] += np.bincount(klo[ok] - k_lo, minlength=width).astype(np.int32)
            diff[row] -= np.bincount(khi[ok] + 1 - k_lo, minlength=width).astype(np.int32)
    return diff


def _check_box(M: int, K: int, m_lo: int, k_lo: int) -> None:
    if M < 1 or K < 1 or not 1 <= m_lo <= M or not 1 <= k_lo <= K:
        raise PreconditionError(f"invalid box m in [{m_lo}, {M}], k in [{k_lo}, {K}]")
    SearchWindow(M, K)


def _table_bytes(rows: int, cols: int, strategy: str, workers: int = 1) -> int:
    # prime_driven: one int32 difference array per worker, the merged one, and the bool result
    return rows * cols * (4 * workers + 5 if strategy == "prime_driven" else 1)


def resolve_strategy(M: int, K: int, strategy: str, m_lo: int = 1, k_lo: int = 1) -> str:
    if strategy not in STRATEGIES:
        raise PreconditionError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if strategy != "auto":
        return strategy
    rows, cols = M - m_lo + 1, K - k_lo + 1
    if (
        rows * cols >= AUTO_MIN_BOX
        and M * M * K <= AUTO_MAX_SIEVE
        and _table_bytes(rows, cols + 1, "prime_driven") <= memory_budget()
    ):
        return "prime_driven"
    return "direct"


def _split(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    step = -(-(hi - lo) // parts)
    return [(a, min(a + step, hi)) for a in range(lo, hi, step)]


def _run(fn, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*jobs)))


def occurrence_table(
    M: int,
    K: int,
    strategy: str = "auto",
    *,
    m_lo: int = 1,
    k_lo: int = 1,
    workers: int = 1,
) -> np.ndarray:
    """Boolean table ``T[m - m_lo, k - k_lo]`` of occurring pairs in the box.

    The result is identical for every strategy and worker count.
    """
    _check_box(M, K, m_lo, k_lo)
    strategy = resolve_strategy(M, K, strategy, m_lo, k_lo)
    rows, cols = M - m_lo + 1, K - k_lo + 1
    workers = max(1, workers)
    need = _table_bytes(rows, cols + 1, strategy, workers)
    budget = memory_budget()
    if need > budget:
        raise MemoryBudgetError(
            f"occurrence table of {rows} x {cols} entries needs {need} bytes, "
            f"budget is {budget} bytes (ECG_MEM_BUDGET_BYTES)"
        )
    if strategy == "direct":
        stripes = [(a, b - 1, k_lo, K) for a, b in _split(m_lo, M + 1, workers)]
        return np.vstack(_run(_direct_rows, stripes, workers))
    p_lo, p_hi = _p_range(np.arange(m_lo, M + 1, dtype=np.int64), k_lo, K)
    lo, hi = int(p_lo.min()), int(p_hi.max()) + 1
    parts = min(workers, max(1, -(-(hi - lo) // (2 * SEGMENT_ODDS))))
    chunks = [(a, b, m_lo, M, k_lo, K) for a, b in _split(lo, hi, parts)]
    diff = np.zeros((rows, cols + 1), dtype=np.int32)
    for part in _run(_prime_driven_chunk, chunks, workers):
        diff += part
    return np.cumsum(diff, axis=1)[:, :cols] > 0


def count_S(M: int, K: int, strategy: str = "auto", workers: int = 1) -> CountReport:
    """Number of pairs m <= M, k <= K for which G_{m,k} occurs."""
    t0 = time.perf_counter()
    chosen = resolve_strategy(M, K, strategy) if M >= 1 and K >= 1 else strategy
    table = occurrence_table(M, K, chosen, workers=workers)
    return CountReport(
        M=M,
        K=K,
        count=int(table.sum()),
        strategy=chosen,
        elapsed=time.perf_counter() - t0,
        per_m=table.sum(axis=1).tolist(),
        per_k=table.sum(axis=0).tolist(),
    )


def count_R(M: int, K: int, strategy: str = "auto", workers: int = 1) -> int:
    """Number of non-occurring pairs in the dyadic box M/2 < m <= M, K/2 < k <= K."""
    table = occurrence_table(M, K, strategy, m_lo=M // 2 + 1, k_lo=K // 2 + 1, workers=workers)
    return int(table.size - table.sum())


def density_scan(M: int, k_grid: list[int], strategy: str = "auto", workers: int = 1) -> list[tuple[int, float]]:
    """(K, #S(M, K) / (M K)) for each K in an ascending grid, from one shared table."""
    if not k_grid:
        return []
    if list(k_grid) != sorted(k_grid) or k_grid[0] < 1:
        raise PreconditionError("k_grid must be ascending positive integers")
    table = occurrence_table(M, k_grid[-1], strategy, workers=workers)
    running = np.cumsum(table.sum(axis=0))
    return [(K, int(running[K - 1]) / (M * K)) for K in k_grid]
