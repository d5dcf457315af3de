"""CSV/JSON rendering with per-subcommand column schemas."""

from __future__ import annotations

import json
import math
from fractions import Fraction

SCHEMAS: dict[str, str] = {
    "occurs": "m,k,order,occurs,witnesses,candidates",
    "count": "M,K,count,density,strategy",
    "count-r": "M,K,count_r",
    # golden-only: the full prefix table of #S(M', K')
    "count-table": "M,K,count,density",
    "density-scan": "M,K,density",
    "shapes-for-prime": "p,m,k,order",
    "curves": "p,m,k,order,count",
    "verify-ruck": "p,orders,shapes,curves,status",
    "m-of-g": "m,k,order,M,censored,primes",
    "aut": "m,k,order,aut",
    "cl-ratio": "m,k,order,M,lhs,rhs_unnormalized,censored",
    "rho": "k,j,d,rho",
    "sieve": "k,j,M,y,survivors,main_term",
    "euler-product": "d,conductor,y0,y,product,l1_reference",
    "fund-disc": "d,d1,a",
    "t-sum": "d,K,t_sum",
    "discrepancy": "y,h,q,a,discrepancy",
    "ratios": "M,K,count,thm12,thm13_density,thm14_ratio",
    "golden": "experiment,rows,status",
}


def columns(command: str) -> list[str]:
    return SCHEMAS[command].split(",")


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g") if math.isfinite(value) else str(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return ";".join(":".join(map(str, v)) if isinstance(v, (list, tuple)) else fmt(v) for v in value)
    if value is None:
        return ""
    return str(value)


def render_csv(command: str, rows: list[dict]) -> str:
    cols = columns(command)
    lines = [",".join(cols)]
    lines += [",".join(fmt(row.get(c)) for c in cols) for row in rows]
    return "\n".join(lines) + "\n"


def _jsonable(value):
    if isinstance(value, float):
        return float(format(value, ".12g")) if math.isfinite(value) else str(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    if isinstance(value, list):
        return [_jsonable(v) for v in value]
    return value


def render_json(command: str, rows: list[dict]) -> str:
    cols = columns(command)
    payload = [{c: _jsonable(row.get(c)) for c in cols} for row in rows]
    return json.dumps(payload, indent=1) + "\n"


def render(command: str, rows: list[dict], fmt_name: str = "csv") -> str:
    if fmt_name == "json":
        return render_json(command, rows)
    return render_csv(command, rows)
