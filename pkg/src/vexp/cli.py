"""Command line interface.

Subcommands:
  audit      run an audit configuration and write CSV/JSON reports
  norm       Luxemburg norm of an expression
  modulus    smoothness modulus of an expression
  approx     bandlimited-approximation error (the computable upper bound)
  constants  dump the constant table as CSV
"""

from __future__ import annotations

import argparse
import sys

from .audit import run_suite
from .config import ConfigError
from .constants import constant_table
from .corpus import resolve_exponent, resolve_function
from .defaults import default_config_text
from .fnexpr import ExponentRangeError, ParseError
from .norms import NormSpec, luxemburg_norm
from .quad import DEFAULT_SPEC
from .smoothness import ModulusRequest, modulus
from .bandlimited import best_approx_surrogate


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vexp",
                                 description="Steklov smoothness and "
                                             "bandlimited-approximation audits")
    sub = ap.add_subparsers(dest="command", required=True)

    p_audit = sub.add_parser("audit", help="run an audit suite")
    p_audit.add_argument("--config", default=None,
                         help="configuration file (default: bundled suite)")
    p_audit.add_argument("--out", default="reports", help="report directory")
    p_audit.add_argument("--jobs", type=int, default=1,
                         help="concurrent case execution")

    p_norm = sub.add_parser("norm", help="Luxemburg norm of an expression")
    p_norm.add_argument("--f", required=True, help="function expression or @member")
    p_norm.add_argument("--p", required=True, help="exponent expression or @name")
    p_norm.add_argument("--p-infinity", type=float, default=None)
    p_norm.add_argument("--window", type=float, default=None)

    p_mod = sub.add_parser("modulus", help="smoothness modulus")
    p_mod.add_argument("--f", required=True)
    p_mod.add_argument("--p", default=None, help="exponent (omit for sup norm)")
    p_mod.add_argument("--p-infinity", type=float, default=None)
    p_mod.add_argument("--r", type=int, required=True)
    p_mod.add_argument("--delta", type=float, required=True)
    p_mod.add_argument("--window", type=float, default=None)

    p_ap = sub.add_parser("approx", help="bandlimited approximation error")
    p_ap.add_argument("--f", required=True)
    p_ap.add_argument("--sigma", type=float, required=True)
    p_ap.add_argument("--norm", choices=("sup", "vexp"), default="sup")
    p_ap.add_argument("--p", default="2", help="exponent for --norm vexp")
    p_ap.add_argument("--p-infinity", type=float, default=None)
    p_ap.add_argument("--window", type=float, default=None)

    p_const = sub.add_parser("constants", help="dump the constant table as CSV")
    p_const.add_argument("--r", type=int, default=1)
    p_const.add_argument("--k", type=int, default=1)
    p_const.add_argument("--pplus", type=float, default=2.0)
    p_const.add_argument("--c3", type=float, default=0.0)
    return ap


def _warn_estimates(p) -> None:
    if not p.is_constant:
        print("note: log-continuity constants are grid estimates "
              f"(c_local={p.c_log_local:.6g}, c_decay={p.c_log_decay:.6g})",
              file=sys.stderr)


def _cmd_audit(args) -> int:
    if args.config:
        with open(args.config) as fh:
            text = fh.read()
    else:
        text = default_config_text()
    report, code = run_suite(text, out_dir=args.out, jobs=args.jobs)
    print(f"pass={report.n_pass} fail={report.n_fail} "
          f"inconclusive={report.n_inconclusive}")
    for row in report.failed_rows():
        print(f"FAIL {row.theorem_id} {row.case_id} "
              f"lhs={row.lhs:.6g} rhs={row.rhs:.6g}")
    print(f"reports written to {args.out}/audit.csv and {args.out}/audit.json")
    return code


def _cmd_norm(args) -> int:
    m = resolve_function(args.f)
    p = resolve_exponent(args.p, args.p_infinity)
    _warn_estimates(p)
    res = luxemburg_norm(m.rf, p, DEFAULT_SPEC,
                         window=args.window or m.norm_window,
                         panels_per_unit=m.panels_per_unit)
    print(f"{res.value:.12g}")
    return 0


def _cmd_modulus(args) -> int:
    m = resolve_function(args.f)
    if args.p is None:
        norm = NormSpec.sup(args.window or m.sup_window)
    else:
        p = resolve_exponent(args.p, args.p_infinity)
        _warn_estimates(p)
        norm = NormSpec.vexp(p, window=args.window or m.norm_window,
                             panels_per_unit=m.panels_per_unit)
    val = modulus(ModulusRequest(m.rf, args.r, args.delta, norm), DEFAULT_SPEC)
    print(f"{val:.12g}")
    return 0


def _cmd_approx(args) -> int:
    m = resolve_function(args.f)
    if args.norm == "sup":
        norm = NormSpec.sup(args.window or m.sup_window)
    else:
        p = resolve_exponent(args.p, args.p_infinity)
        _warn_estimates(p)
        norm = NormSpec.vexp(p, window=args.window or m.norm_window,
                             panels_per_unit=m.panels_per_unit)
    est = best_approx_surrogate(m.rf, args.sigma, norm, DEFAULT_SPEC)
    print(f"{est.value:.12g}")
    if est.tail_bound:
        print(f"note: convolution tail bound {est.tail_bound:.3g}",
              file=sys.stderr)
    return 0


def _cmd_constants(args) -> int:
    table = constant_table(args.r, args.k, args.pplus, args.c3)
    sys.stdout.write(table.as_csv())
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "audit":
            return _cmd_audit(args)
        if args.command == "norm":
            return _cmd_norm(args)
        if args.command == "modulus":
            return _cmd_modulus(args)
        if args.command == "approx":
            return _cmd_approx(args)
        if args.command == "constants":
            return _cmd_constants(args)
    except (ParseError, ConfigError, ExponentRangeError, ValueError,
            KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
