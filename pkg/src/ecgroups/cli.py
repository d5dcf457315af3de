"""Command-line front end: one subcommand per object, CSV or JSON on stdout.

Exit codes: 0 success, 2 usage error, 3 precondition or overflow, 4 golden
or verification mismatch.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from . import experiments as ex
from . import golden
from .errors import PreconditionError
from .report import render

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_MISMATCH = 0, 2, 3, 4


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _int_list(text: str) -> list[int]:
    return [_int(t) for t in text.split(",") if t]


def _float(text: str) -> float:
    try:
        return float(text.replace("_", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", type=Path, help="write the report here instead of stdout")
    common.add_argument("--threads", type=_int, default=os.cpu_count() or 1, help="worker processes")
    common.add_argument("--mem-budget", type=_int, help="bytes allowed for occurrence tables")
    common.add_argument("--timing", action="store_true", help="report elapsed time on stderr")

    parser = argparse.ArgumentParser(prog="ecgroups", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    strategies = ("auto", "direct", "prime_driven")

    p = add("occurs", "does Z/m x Z/mk occur over some prime field")
    p.add_argument("--m", type=_int, required=True)
    p.add_argument("--k", type=_int, required=True)
    p.add_argument("--witnesses", action="store_true", help="list every witness prime")
    p.add_argument("--candidates", action="store_true", help="list every window candidate")

    for name, help_text in (("count", "#S(M,K)"), ("count-r", "#R(M,K) over the dyadic box")):
        p = add(name, help_text)
        p.add_argument("--max-m", type=_int, required=True)
        p.add_argument("--max-k", type=_int, required=True)
        p.add_argument("--strategy", choices=strategies, default="auto")

    p = add("density-scan", "#S(M,K)/(MK) along a K grid")
    p.add_argument("--max-m", type=_int, required=True)
    p.add_argument("--k-grid", type=_int_list, required=True, help="comma-separated ascending K values")
    p.add_argument("--strategy", choices=strategies, default="auto")

    p = add("shapes-for-prime", "group shapes (m,k), m <= M, whose window holds p")
    p.add_argument("--p", type=_int, required=True)
    p.add_argument("--max-m", type=_int, required=True)

    p = add("curves", "census of group shapes over F_p")
    p.add_argument("--p", type=_int, required=True)
    p.add_argument("--mode", choices=("raw", "iso"), default="raw")

    p = add("verify-ruck", "census against Rueck's admissible groups")
    p.add_argument("--p-min", type=_int, default=5)
    p.add_argument("--p-max", type=_int, required=True)

    for name, help_text in (("m-of-g", "M(G) summed over window primes"), ("cl-ratio", "Cohen-Lenstra pair")):
        p = add(name, help_text)
        p.add_argument("--m", type=_int, required=True)
        p.add_argument("--k", type=_int, required=True)
        p.add_argument("--mode", choices=("raw", "iso"), default="raw")

    p = add("aut", "#Aut(Z/m x Z/mk)")
    p.add_argument("--m", type=_int, required=True)
    p.add_argument("--k", type=_int, required=True)
    p.add_argument("--mode", choices=("closed", "brute"), default="closed")

    p = add("rho", "roots of k c^2 + j c + 1 mod d")
    p.add_argument("--k", type=_int, required=True)
    p.add_argument("--j", type=_int, required=True)
    p.add_argument("--d", type=_int_list, required=True)
    p.add_argument("--method", choices=("auto", "formula", "brute"), default="auto")

    p = add("sieve", "exact survivors and main term for k m^2 + j m + 1")
    p.add_argument("--k", type=_int, required=True)
    p.add_argument("--j", type=_int, required=True)
    p.add_argument("--max-m", type=_int, required=True)
    p.add_argument("--y", type=_int_list, required=True)

    p = add("euler-product", "truncated product of (1 - chi(l)/l), chi = (-d/.)")
    p.add_argument("--d", type=_int_list, required=True)
    p.add_argument("--y", type=_int, required=True)
    p.add_argument("--y0", type=_int, default=0)
    p.add_argument("--terms", type=_int, default=10**6, help="series terms for L(1,chi); 0 skips it")

    p = add("fund-disc", "conductor and square part of -d")
    p.add_argument("--d", type=_int_list, required=True)

    p = add("t-sum", "T_d = sum of k/phi(k) over j^2 - 4k = -d")
    p.add_argument("--d", type=_int_list, required=True)
    p.add_argument("--max-k", type=_int, required=True)

    p = add("discrepancy", "|psi(y+h;q,a) - psi(y;q,a) - h/phi(q)|")
    p.add_argument("--y", type=_float, required=True)
    p.add_argument("--h", type=_float, required=True)
    p.add_argument("--q", type=_int, default=1)
    p.add_argument("--a", type=_int, default=0)

    p = add("ratios", "normalised #S(M,K) for each (M,K) pair")
    p.add_argument("--max-m", type=_int_list, required=True, help="comma-separated M values")
    p.add_argument("--max-k", type=_int_list, required=True, help="comma-separated K values, or one K for all")
    p.add_argument("--strategy", choices=strategies, default="auto")

    p = add("golden", "re-run golden experiments and diff against blessed files")
    p.add_argument("--dir", type=Path, default=Path("golden"))
    p.add_argument("--bless", action="store_true", help="regenerate the files with the oracle routes")
    p.add_argument("--only", type=lambda s: s.split(","), help="comma-separated experiment names")
    return parser


def _rows(args) -> list[dict]:
    w = max(1, args.threads)
    cmd = args.command
    if cmd == "occurs":
        return ex.occurs_rows(args.m, args.k, args.witnesses, args.candidates)
    if cmd == "count":
        return ex.count_rows(args.max_m, args.max_k, args.strategy, w)
    if cmd == "count-r":
        return ex.count_r_rows(args.max_m, args.max_k, args.strategy, w)
    if cmd == "density-scan":
        return ex.density_rows(args.max_m, args.k_grid, args.strategy, w)
    if cmd == "shapes-for-prime":
        return ex.shapes_for_prime_rows(args.p, args.max_m)
    if cmd == "curves":
        return ex.census_rows(args.p, args.mode, w)
    if cmd == "verify-ruck":
        return ex.verify_ruck_rows(args.p_min, args.p_max, w)
    if cmd == "m-of-g":
        return ex.m_of_g_rows(args.m, args.k, args.mode)
    if cmd == "aut":
        return ex.aut_rows(args.m, args.k, args.mode)
    if cmd == "cl-ratio":
        return ex.cl_ratio_rows(args.m, args.k, args.mode)
    if cmd == "rho":
        return ex.rho_rows(args.k, args.j, args.d, args.method)
    if cmd == "sieve":
        return ex.sieve_rows(args.k, args.j, args.max_m, args.y)
    if cmd == "euler-product":
        return ex.euler_rows(args.d, args.y, args.y0, args.terms)
    if cmd == "fund-disc":
        return ex.fund_disc_rows(args.d)
    if cmd == "t-sum":
        return ex.t_sum_rows(args.d, args.max_k)
    if cmd == "discrepancy":
        return ex.discrepancy_rows(args.y, args.h, args.q, args.a)
    if cmd == "ratios":
        ks = args.max_k * len(args.max_m) if len(args.max_k) == 1 else args.max_k
        if len(ks) != len(args.max_m):
            raise PreconditionError("--max-k needs one value or one per --max-m value")
        return ex.ratio_rows(list(zip(args.max_m, ks)), args.strategy, w)
    if cmd == "golden":
        if args.bless:
            return golden.bless(args.dir, w, args.only)
        return golden.check(args.dir, w, args.only)
    raise AssertionError(cmd)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    saved = os.environ.get("ECG_MEM_BUDGET_BYTES")
    if args.mem_budget is not None:
        os.environ["ECG_MEM_BUDGET_BYTES"] = str(args.mem_budget)
    t0 = time.perf_counter()
    try:
        rows = _rows(args)
    except PreconditionError as err:
        print(f"ecgroups {args.command}: {err}", file=sys.stderr)
        return EXIT_PRECONDITION
    finally:
        # main() may be called in-process; leave the environment as found
        if saved is None:
            os.environ.pop("ECG_MEM_BUDGET_BYTES", None)
        else:
            os.environ["ECG_MEM_BUDGET_BYTES"] = saved
    text = render(args.command, rows, args.format)
    if args.output:
        args.output.write_text(text, newline="\n")
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head); silence the flush at exit
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    if args.timing:
        print(f"elapsed {time.perf_counter() - t0:.3f} s", file=sys.stderr)

    failed = [r for r in rows if r.get("status") in ("MISMATCH", "MISSING")]
    for r in failed:
        print(f"{r.get('experiment', r.get('p'))}: {r.get('detail') or r['status']}", file=sys.stderr)
    if args.command in ("golden", "verify-ruck") and not (args.command == "golden" and args.bless):
        print("FAIL" if failed else "OK", file=sys.stderr)
    return EXIT_MISMATCH if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
