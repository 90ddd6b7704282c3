"""Command-line interface: ``logsyn <command> ...``.

Exit codes: 0 success, 1 usage error, 2 mismatch with a closed form or a
failed check, 3 insufficient precision or orbit stabilization failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .errors import InsufficientPrecision, LogSynError, StabilizationFailure
from .logtc import logtc_table
from .padic import FinPModule
from .report import Report
from .syntomic import (
    ClosedForm,
    descent_square_check,
    nil_invariance_check,
    run_syntomic,
)
from .toric import axes_table, perfection_check, verify_axes_proof
from .witt import ptypical_decomposition

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_PRECISION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _prime(text: str) -> int:
    p = int(text)
    if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise argparse.ArgumentTypeError(f"{text} is not prime")
    return p


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"{text} must be positive")
    return n


def _nonneg(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError(f"{text} must be nonnegative")
    return n


def _range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"range {text!r} must look like LO..HI") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _vec(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"ray {text!r} must look like X,Y") from None
    return a, b


def _factors(m: FinPModule) -> list[dict]:
    return [{"type": "free-at-cap"} if a == m.N else {"type": "torsion", "exp": a} for a in m.exponents]


def _expansion(p: int, m: int) -> str:
    return ptypical_decomposition(p, m).describe()


def _closed_form_text(cf: ClosedForm, p: int, degree: int) -> str:
    parts = []
    for t in cf.terms:
        if t.shift != degree:
            continue
        if t.big_witt is None:
            parts.append("W")
        else:
            parts.append(f"{t.label} ({_expansion(p, t.big_witt)})")
    return " + ".join(parts) if parts else "0"


def _envelope(command: str, p, e, i, precision, result, passed: bool, **extra) -> dict:
    out = {"command": command, "p": p, "e": e, "i": i, "precision": precision, "result": result, "pass": passed}
    out.update(extra)
    return out


def _emit(args, payload, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=False))
    else:
        print(text)


def _i_values(args) -> list[int]:
    if args.range is not None:
        lo, hi = args.range
        if lo < 0:
            raise UsageError("--range must start at 0 or above")
        return list(range(lo, hi + 1))
    if args.i is None:
        raise UsageError("give --i or --range")
    return [args.i]


def cmd_syntomic(args) -> int:
    payloads, texts, ok = [], [], True
    for i in _i_values(args):
        run = run_syntomic(args.p, args.e, i, args.precision, args.orbit_bound)
        N = run.result.precision
        bound = run.result.j_bound
        passed = run.report.passed
        ok &= passed
        payloads.append(
            _envelope("syntomic", args.p, args.e, i, N, [_factors(m) for m in run.result.degrees], passed,
                      orbit_bound=bound)
        )
        lines = [f"syntomic p={args.p} e={args.e} i={i} N={N} orbit-bound={bound}: {'PASS' if passed else 'FAIL'}"]
        for k, m in enumerate(run.result.degrees):
            lines.append(f"  H{k}  {str(m):<28} expected {_closed_form_text(run.closed_form, args.p, k)}")
        for item in run.report.failures():
            lines.append(f"  mismatch: {item.label}: {item.detail}")
        texts.append("\n".join(lines))
    _emit(args, payloads[0] if len(payloads) == 1 else payloads, "\n".join(texts))
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_logtc(args) -> int:
    lo, hi = args.range if args.range is not None else (-2, 9)
    table = logtc_table(args.e, args.p, (lo, hi), args.precision)
    result = [{"degree": t.degree, "descriptor": t.describe(), "factors": _factors(t.module)} for t in table.entries]
    lines = [f"logTC p={args.p} e={args.e} N={table.precision}"]
    for t in table.entries:
        desc = " + ".join(
            "W" if term.big_witt is None else f"{term.label} ({_expansion(args.p, term.big_witt)})" for term in t.terms
        ) or "0"
        lines.append(f"  pi_{t.degree:<3} {desc}")
    _emit(args, _envelope("logtc", args.p, args.e, None, table.precision, result, True), "\n".join(lines))
    return EXIT_OK


def _report_cmd(args, command: str, rep: Report, e=None, i=None, precision=None) -> int:
    result = [{"label": it.label, "pass": it.passed, "detail": it.detail} for it in rep.items]
    _emit(args, _envelope(command, getattr(args, "p", None), e, i, precision, result, rep.passed), rep.render())
    return EXIT_OK if rep.passed else EXIT_MISMATCH


def cmd_descent(args) -> int:
    i = _i_values(args)[0]
    rep = descent_square_check(args.p, i, args.precision, args.orbit_bound)
    return _report_cmd(args, "descent", rep, None, i, rep.data["precision"])


def cmd_nilinv(args) -> int:
    i = _i_values(args)[0]
    rep = nil_invariance_check(args.e, args.p, i, args.precision, args.orbit_bound)
    return _report_cmd(args, "nilinv", rep, args.e, i, rep.data["precision"])


def cmd_axes(args) -> int:
    i = _i_values(args)[0]
    table = axes_table(args.p, i, args.precision)
    result = [_factors(m) for m in table.degrees]
    lines = [f"axes p={args.p} i={i} N={table.precision}: {'PASS' if table.passed else 'FAIL'}", f"  = {table.description}"]
    lines += [f"  H{k}  {m}" for k, m in enumerate(table.degrees)]
    _emit(args, _envelope("axes", args.p, None, i, table.precision, result, table.passed), "\n".join(lines))
    return EXIT_OK if table.passed else EXIT_MISMATCH


def cmd_fan(args) -> int:
    rep = verify_axes_proof(args.ray) if args.ray is not None else verify_axes_proof()
    return _report_cmd(args, "fan verify-axes", rep)


def cmd_witt(args) -> int:
    shape = ptypical_decomposition(args.p, args.m)
    result = [[j, s] for j, s in shape.components]
    text = f"bW_{args.m}(F_{args.p}) = {shape.describe()}\n" + "\n".join(f"  j={j:<4} s={s}" for j, s in shape.components)
    _emit(args, _envelope("witt decompose", args.p, None, None, None, result, True), text)
    return EXIT_OK


def cmd_perfection(args) -> int:
    rep = perfection_check(args.p, args.denominator_bound, args.height_bound)
    return _report_cmd(args, "perfection", rep)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="logsyn", description="Log syntomic cohomology of truncated polynomial rings.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, e=True, i=True, orbits=True):
        sp.add_argument("--p", type=_prime, required=True)
        if e:
            sp.add_argument("--e", type=_positive, required=True)
        if i:
            sp.add_argument("--i", type=_nonneg)
            sp.add_argument("--range", type=_range, help="LO..HI, inclusive")
        sp.add_argument("--precision", type=_positive, help="working precision N (default: auto)")
        if orbits:
            sp.add_argument("--orbit-bound", type=_positive, help="largest orbit index j (default: e*i + p)")
        sp.add_argument("--format", choices=("json", "text"), default="json")

    common(sub.add_parser("syntomic", help="compare with the closed form"))
    lt = sub.add_parser("logtc", help="homotopy of logTC")
    common(lt, i=False, orbits=False)
    lt.add_argument("--range", type=_range, help="degrees LO..HI (default -2..9)")
    common(sub.add_parser("descent", help="rational descent square"), e=False)
    common(sub.add_parser("nilinv", help="rational nil-invariance"))
    common(sub.add_parser("axes", help="projective axes table"), e=False, orbits=False)

    fan = sub.add_parser("fan", help="fan checks")
    fan_sub = fan.add_subparsers(dest="fan_command", required=True, parser_class=_Parser)
    va = fan_sub.add_parser("verify-axes")
    va.add_argument("--ray", type=_vec, help="the extra ray v as X,Y (default -1,1)")
    va.add_argument("--format", choices=("json", "text"), default="json")

    witt = sub.add_parser("witt", help="Witt vector tools")
    witt_sub = witt.add_subparsers(dest="witt_command", required=True, parser_class=_Parser)
    dec = witt_sub.add_parser("decompose")
    dec.add_argument("--p", type=_prime, required=True)
    dec.add_argument("--m", type=_nonneg, required=True)
    dec.add_argument("--format", choices=("json", "text"), default="json")

    perf = sub.add_parser("perfection", help="perfection of N")
    perf.add_argument("--p", type=_prime, required=True)
    perf.add_argument("--denominator-bound", type=_nonneg, default=3)
    perf.add_argument("--height-bound", type=_nonneg, default=10)
    perf.add_argument("--format", choices=("json", "text"), default="json")
    return parser


COMMANDS = {
    "syntomic": cmd_syntomic,
    "logtc": cmd_logtc,
    "descent": cmd_descent,
    "nilinv": cmd_nilinv,
    "axes": cmd_axes,
    "fan": cmd_fan,
    "witt": cmd_witt,
    "perfection": cmd_perfection,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"logsyn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InsufficientPrecision, StabilizationFailure) as exc:
        print(f"logsyn: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except LogSynError as exc:
        print(f"logsyn: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except ValueError as exc:
        print(f"logsyn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


__all__ = ["main", "build_parser"]
