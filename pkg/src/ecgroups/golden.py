"""Golden-file regression: bless with the brute-force routes, check with the fast ones.

Each experiment has a ``bless`` builder (the oracle) and a ``check`` builder
(the production path).  Integer cells must match exactly, real cells to a
relative 1e-9.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import experiments as ex
from .report import render_csv
from .sieve import l1_reference

REL_TOL = 1e-9

EULER_DS = [3, 4, 7, 8, 11]
TREND_PAIRS = [(10, 10**5), (10**4, 4)]
THM12_PAIRS = [(10**3, 4), (10**4, 4), (10**5, 4)]


@dataclass(frozen=True)
class Experiment:
    name: str
    schema: str
    bless: Callable[[int], list[dict]]
    check: Callable[[int], list[dict]]


def _euler_bless(workers: int) -> list[dict]:
    rows = ex.euler_rows(EULER_DS, 10**5, terms=10**6)
    for row in rows:
        # independent series must agree with the product before anything is frozen
        ratio = row["product"] * l1_reference(row["d"], 10**7)
        if not 0.98 <= ratio <= 1.02:
            raise AssertionError(f"Euler product for d={row['d']} disagrees with L(1, chi): {ratio}")
    return rows


EXPERIMENTS = [
    Experiment(
        "count_table_64",
        "count-table",
        lambda w: ex.count_table_rows(64, 64, "direct", w),
        lambda w: ex.count_table_rows(64, 64, "prime_driven", w),
    ),
    Experiment(
        "census_97",
        "curves",
        lambda w: ex.census_rows(97, "raw", w),
        lambda w: ex.census_rows(97, "raw", w),
    ),
    Experiment(
        "euler_products",
        "euler-product",
        _euler_bless,
        lambda w: ex.euler_rows(EULER_DS, 10**5, terms=10**6),
    ),
    Experiment(
        "theorem_trend",
        "ratios",
        lambda w: ex.ratio_rows(TREND_PAIRS, "direct", w),
        lambda w: ex.ratio_rows(TREND_PAIRS, "auto", w),
    ),
    Experiment(
        "thm12_table",
        "ratios",
        lambda w: ex.ratio_rows(THM12_PAIRS, "direct", w),
        lambda w: ex.ratio_rows(THM12_PAIRS, "auto", w),
    ),
]


class GoldenError(Exception):
    """A golden file is missing, corrupt, or disagrees with a fresh run."""


def golden_path(directory: Path, name: str) -> Path:
    return Path(directory) / f"{name}.csv"


def bless(directory: Path, workers: int = 1, only: list[str] | None = None) -> list[dict]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for exp in EXPERIMENTS:
        if only and exp.name not in only:
            continue
        rows = exp.bless(workers)
        golden_path(directory, exp.name).write_text(render_csv(exp.schema, rows), newline="\n")
        out.append({"experiment": exp.name, "rows": len(rows), "status": "BLESSED"})
    return out


def _parse(text: str) -> list[list[str]]:
    return list(csv.reader(io.StringIO(text)))


def _cell_equal(a: str, b: str) -> bool:
    if a == b:
        return True
    try:
        int(a), int(b)
        return False
    except ValueError:
        pass
    try:
        x, y = float(a), float(b)
    except ValueError:
        return False
    return math.isclose(x, y, rel_tol=REL_TOL, abs_tol=0.0)


def diff(expected: str, actual: str) -> str | None:
    """First difference between two CSV documents, or None."""
    exp, act = _parse(expected), _parse(actual)
    if not exp or exp[0] != act[0]:
        return f"header {exp[0] if exp else None} != {act[0] if act else None}"
    if len(exp) != len(act):
        return f"{len(exp) - 1} golden rows, {len(act) - 1} fresh rows"
    for i, (r1, r2) in enumerate(zip(exp, act)):
        if len(r1) != len(r2) or not all(_cell_equal(a, b) for a, b in zip(r1, r2)):
            return f"row {i}: golden {r1} != fresh {r2}"
    return None


def load(directory: Path, name: str) -> list[dict]:
    """Blessed rows of one experiment as dicts of strings."""
    path = golden_path(directory, name)
    if not path.is_file():
        raise GoldenError(f"missing golden file {path}")
    return list(csv.DictReader(io.StringIO(path.read_text())))


def check(directory: Path, workers: int = 1, only: list[str] | None = None) -> list[dict]:
    out = []
    for exp in EXPERIMENTS:
        if only and exp.name not in only:
            continue
        path = golden_path(directory, exp.name)
        if not path.is_file():
            out.append({"experiment": exp.name, "rows": 0, "status": "MISSING", "detail": f"missing golden file {path}"})
            continue
        expected = path.read_text()
        rows = exp.check(workers)
        problem = diff(expected, render_csv(exp.schema, rows))
        out.append(
            {
                "experiment": exp.name,
                "rows": len(rows),
                "status": "OK" if problem is None else "MISMATCH",
                "detail": problem,
            }
        )
    return out
