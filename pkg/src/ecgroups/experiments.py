"""Row builders shared by the command line and the golden-file harness.

Each function returns a list of dicts keyed by the columns in
:data:`ecgroups.report.SCHEMAS` for the matching subcommand.
"""

from __future__ import annotations

import numpy as np

from . import curves, occurrence, sieve
from .arith import small_primes
from .occurrence import GroupShape


def occurs_rows(m: int, k: int, witnesses: bool = False, candidates: bool = False) -> list[dict]:
    res = occurrence.occurs(m, k, want_witnesses=witnesses)
    cands = [n for n, _ in occurrence.SearchWindow(m, k).candidates()] if candidates else []
    return [
        {
            "m": m,
            "k": k,
            "order": res.shape.order,
            "occurs": res.occurs,
            "witnesses": [list(w) for w in res.witnesses],
            "candidates": cands,
        }
    ]


def count_rows(M: int, K: int, strategy: str = "auto", workers: int = 1) -> list[dict]:
    rep = occurrence.count_S(M, K, strategy, workers)
    return [{"M": M, "K": K, "count": rep.count, "density": rep.count / (M * K), "strategy": rep.strategy}]


def count_table_rows(M: int, K: int, strategy: str = "auto", workers: int = 1) -> list[dict]:
    """#S(M', K') for every M' <= M, K' <= K, from one occurrence table."""
    table = occurrence.occurrence_table(M, K, strategy, workers=workers)
    sums = table.astype(np.int64).cumsum(axis=0).cumsum(axis=1)
    rows = []
    for mm in range(1, M + 1):
        for kk in range(1, K + 1):
            c = int(sums[mm - 1, kk - 1])
            rows.append({"M": mm, "K": kk, "count": c, "density": c / (mm * kk)})
    return rows


def count_r_rows(M: int, K: int, strategy: str = "auto", workers: int = 1) -> list[dict]:
    return [{"M": M, "K": K, "count_r": occurrence.count_R(M, K, strategy, workers)}]


def density_rows(M: int, grid: list[int], strategy: str = "auto", workers: int = 1) -> list[dict]:
    return [{"M": M, "K": K, "density": dens} for K, dens in occurrence.density_scan(M, grid, strategy, workers)]


def shapes_for_prime_rows(p: int, M: int) -> list[dict]:
    return [{"p": p, "m": s.m, "k": s.k, "order": s.order} for s in occurrence.shapes_for_prime(p, M)]


def census_rows(p: int, mode: str = "raw", workers: int = 1) -> list[dict]:
    return [
        {"p": p, "m": s.m, "k": s.k, "order": s.order, "count": n}
        for s, n in curves.census(p, mode, workers).items()
    ]


def verify_ruck_rows(p_min: int, p_max: int, workers: int = 1) -> list[dict]:
    """Census shapes per order against Rueck's list, one row per prime."""
    rows = []
    for p in small_primes(p_max).tolist():
        if p < max(5, p_min):
            continue
        cen = curves.census(p, "raw", workers)
        observed: dict[int, set] = {}
        for s in cen:
            observed.setdefault(s.order, set()).add(s)
        window = [N for N in range(1, p + 2 + 2 * int(p**0.5) + 2) if curves.in_hasse_window(N, p)]
        ok = set(observed) <= set(window) and all(observed.get(N, set()) == curves.ruck_enumerate(N, p) for N in window)
        ok = ok and all((p - 1) % s.m == 0 for s in cen)
        rows.append(
            {
                "p": p,
                "orders": len(observed),
                "shapes": len(cen),
                "curves": sum(cen.values()),
                "status": "OK" if ok else "MISMATCH",
            }
        )
    return rows


def m_of_g_rows(m: int, k: int, mode: str = "raw") -> list[dict]:
    mc = curves.M_of_G(GroupShape(m, k), mode)
    return [{"m": m, "k": k, "order": mc.shape.order, "M": mc.total, "censored": mc.censored, "primes": list(mc.primes)}]


def aut_rows(m: int, k: int, mode: str = "closed") -> list[dict]:
    shape = GroupShape(m, k)
    return [{"m": m, "k": k, "order": shape.order, "aut": curves.aut_order(shape, mode)}]


def cl_ratio_rows(m: int, k: int, mode: str = "raw") -> list[dict]:
    shape = GroupShape(m, k)
    r = curves.cohen_lenstra_ratio(shape, mode)
    total = curves.M_of_G(shape, mode).total
    return [
        {
            "m": m,
            "k": k,
            "order": shape.order,
            "M": total,
            "lhs": r.lhs,
            "rhs_unnormalized": r.rhs_unnormalized,
            "censored": r.censored,
        }
    ]


def rho_rows(k: int, j: int, ds: list[int], method: str = "auto") -> list[dict]:
    spec = sieve.RhoSpec(k, j)
    return [{"k": k, "j": j, "d": d, "rho": sieve.rho(spec, d, method)} for d in ds]


def sieve_rows(k: int, j: int, M: int, ys: list[int]) -> list[dict]:
    inst = sieve.SieveInstance(k, j, M)
    return [
        {
            "k": k,
            "j": j,
            "M": M,
            "y": y,
            "survivors": sieve.sieve_survivors(inst, y),
            "main_term": sieve.sieve_main_term(inst, y),
        }
        for y in ys
    ]


def euler_rows(ds: list[int], y: int, y0: int = 0, terms: int = 10**6) -> list[dict]:
    rows = []
    for d in ds:
        chi = sieve.character(d)
        rows.append(
            {
                "d": d,
                "conductor": chi.d1,
                "y0": y0,
                "y": y,
                "product": sieve.euler_product(chi, y, y0),
                "l1_reference": sieve.l1_reference(d, terms) if terms else None,
            }
        )
    return rows


def fund_disc_rows(ds: list[int]) -> list[dict]:
    return [dict(zip(("d", "d1", "a"), (d, *sieve.fundamental_discriminant(d)))) for d in ds]


def t_sum_rows(ds: list[int], K: int) -> list[dict]:
    return [{"d": d, "K": K, "t_sum": sieve.T_sum(d, K)} for d in ds]


def discrepancy_rows(y: float, h: float, q: int, a: int) -> list[dict]:
    val = sieve.psi_discrepancy(sieve.DiscrepancyQuery(y, h, q, a))
    return [{"y": y, "h": h, "q": q, "a": a, "discrepancy": val}]


def ratio_rows(pairs: list[tuple[int, int]], strategy: str = "auto", workers: int = 1) -> list[dict]:
    rows = []
    for M, K in pairs:
        r = sieve.theorem_ratios(M, K, strategy, workers)
        rows.append({"M": M, "K": K, **r})
    return rows
