"""Command-line front end.

Records go to stdout as JSON (full-precision decimal strings), diagnostics
to stderr.  Exit status: 0 success / all checks passed, 1 numeric or domain
failure, 2 usage or configuration error.

The default precision can be overridden with the ``OHNOZETA_BITS``
environment variable, read once when the parser is built.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import gmpy2
from gmpy2 import mpc, mpfr

from . import __version__
from .errors import ConfigError, InvalidInputError, OhnoZetaError
from .index import compositions, dual, format_index, parse_index, require_admissible, shifted
from .interp import interp_eval, interp_truncated
from .precision import DEFAULT_BITS, DEFAULT_EPS, Evaluation, PrecisionContext
from .series import zeta, zeta_truncated
from .verify import (
    all_passed,
    complex_dict,
    iter_suite,
    load_suite,
    ohno_sum,
    parse_grid,
    report_line,
)

BITS_ENV = "OHNOZETA_BITS"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_bits() -> int:
    raw = os.environ.get(BITS_ENV)
    if raw is None:
        return DEFAULT_BITS
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{BITS_ENV} must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bits", type=int, default=_default_bits(),
                        help=f"mantissa bits (default {DEFAULT_BITS}, env {BITS_ENV})")
    trunc = common.add_mutually_exclusive_group()
    trunc.add_argument("--eps", type=float, default=None,
                       help=f"target error estimate for adaptive evaluation (default {DEFAULT_EPS:g})")
    trunc.add_argument("--terms", type=int, default=None,
                       help="fixed truncation N (zeta/interp/ohno-sum print the raw truncated sum)")
    common.add_argument("--max-terms", type=int, default=None, help="truncation cap for adaptive evaluation")
    common.add_argument("--threads", type=int, default=1, help="worker processes for verify/sweep")
    common.add_argument("--timing", action="store_true", help="add elapsed seconds to records")

    parser = _Parser(prog="ohnozeta", description="Multiple zeta values and the interpolated Ohno function.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dual", parents=[common], help="print the dual index")
    p.add_argument("index")

    p = sub.add_parser("zeta", parents=[common], help="multiple zeta value")
    p.add_argument("index")

    p = sub.add_parser("interp", parents=[common], help="interpolated Ohno function I_k(s)")
    p.add_argument("index")
    p.add_argument("--s", required=True, help="complex argument RE or RE,IM")

    p = sub.add_parser("ohno-sum", parents=[common], help="Ohno sum over compositions of m")
    p.add_argument("index")
    p.add_argument("--m", type=int, required=True)

    p = sub.add_parser("verify", parents=[common], help="run relation checks")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--suite", help="JSON suite file")
    group.add_argument("--weight-max", type=int, help="every admissible index up to this weight")
    group.add_argument("--index", help="a single index")
    p.add_argument("--m-max", type=int, help="largest m for integer checks")
    p.add_argument("--s-grid", help="grid re=a:b:step,im=c:d:step for interpolated checks")

    p = sub.add_parser("sweep", parents=[common], help="tabulate I_k(s) over a grid")
    p.add_argument("index")
    p.add_argument("--s-grid", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    return parser


def _fix_negative_values(argv: list[str]) -> list[str]:
    """Glue ``--s -0.5,2`` into ``--s=-0.5,2`` so argparse does not read an option."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--s", "--s-grid") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _context(args) -> PrecisionContext:
    return PrecisionContext(bits=args.bits, eps=args.eps, max_terms=args.max_terms)


def _fixed_context(args) -> PrecisionContext:
    return PrecisionContext(bits=args.bits, terms=args.terms, eps=args.eps, max_terms=args.max_terms)


def _record(command: str, inputs: dict, ev: Evaluation, bits: int, started: float | None) -> dict:
    rec = {
        "command": command,
        "inputs": inputs,
        "result": complex_dict(ev.value),
        "error_estimate": str(ev.error_estimate),
        "heuristic_error": ev.heuristic,
        "terms_used": ev.terms_used,
        "cancellation_ratio": str(ev.cancellation_ratio),
        "precision_bits": bits,
    }
    if started is not None:
        rec["elapsed_seconds"] = round(time.perf_counter() - started, 6)
    return rec


def _raw_evaluation(value, previous, N: int, bits: int) -> Evaluation:
    """Raw truncated sum with the N/2-vs-N difference heuristic."""
    with gmpy2.context(precision=bits):
        value = mpc(value)
        return Evaluation(value, 10 * abs(value - mpc(previous)), N, mpfr(1))


def _s_inputs(text: str) -> dict:
    fields = [f.strip() for f in text.split(",")]
    if len(fields) == 1:
        fields.append("0")
    if len(fields) != 2:
        raise InvalidInputError(f"cannot parse complex number {text!r}; expected RE or RE,IM")
    return {"re": fields[0], "im": fields[1]}


def _warn_cancellation(ev: Evaluation, bits: int, err) -> None:
    if ev.cancellation_ratio > 1 and gmpy2.log2(ev.cancellation_ratio) > bits / 4:
        print(f"warning: cancellation ratio {float(ev.cancellation_ratio):.3g} costs more than "
              f"{bits // 4} bits of precision", file=err)


def cmd_dual(args, out, err) -> int:
    print(format_index(dual(parse_index(args.index))), file=out)
    return EXIT_OK


def cmd_zeta(args, out, err) -> int:
    started = time.perf_counter() if args.timing else None
    k = require_admissible(parse_index(args.index))
    inputs = {"index": format_index(k), "dual": format_index(dual(k)), "N": args.terms}
    if args.terms is not None:
        ctx = PrecisionContext(bits=args.bits)
        value = zeta_truncated(k, args.terms, ctx)
        prev = zeta_truncated(k, max(args.terms // 2, len(k)), ctx)
        ev = _raw_evaluation(value, prev, args.terms, args.bits)
    else:
        ev = zeta(k, _context(args))
    print(json.dumps(_record("zeta", inputs, ev, args.bits, started)), file=out)
    return EXIT_OK


def cmd_interp(args, out, err) -> int:
    started = time.perf_counter() if args.timing else None
    k = require_admissible(parse_index(args.index))
    s_in = _s_inputs(args.s)
    inputs = {"index": format_index(k), "dual": format_index(dual(k)), "s": s_in, "N": args.terms}
    s = f"{s_in['re']},{s_in['im']}"
    if args.terms is not None:
        ctx = PrecisionContext(bits=args.bits)
        value = interp_truncated(k, s, args.terms, ctx)
        prev = interp_truncated(k, s, max(args.terms // 2, len(k)), ctx)
        ev = _raw_evaluation(value, prev, args.terms, args.bits)
    else:
        ev = interp_eval(k, s, _context(args))
    _warn_cancellation(ev, args.bits, err)
    print(json.dumps(_record("interp", inputs, ev, args.bits, started)), file=out)
    return EXIT_OK


def cmd_ohno_sum(args, out, err) -> int:
    started = time.perf_counter() if args.timing else None
    k = require_admissible(parse_index(args.index))
    if args.m < 0:
        raise InvalidInputError("--m must be nonnegative")
    inputs = {"index": format_index(k), "dual": format_index(dual(k)), "m": args.m, "N": args.terms}
    if args.terms is not None:
        ctx = PrecisionContext(bits=args.bits)
        N, half = args.terms, max(args.terms // 2, len(k))
        with gmpy2.context(precision=args.bits):
            value = sum((zeta_truncated(shifted(k, e), N, ctx) for e in compositions(len(k), args.m)), mpc(0))
            prev = sum((zeta_truncated(shifted(k, e), half, ctx) for e in compositions(len(k), args.m)), mpc(0))
        ev = _raw_evaluation(value, prev, N, args.bits)
    else:
        ev = ohno_sum(k, args.m, _context(args))
    print(json.dumps(_record("ohno-sum", inputs, ev, args.bits, started)), file=out)
    return EXIT_OK


def _suite_from_args(args) -> dict:
    if args.suite:
        return load_suite(args.suite)
    if args.weight_max is not None:
        if args.s_grid:
            return {"checks": [{"kind": "ohno-interp", "weight_max": args.weight_max, "s_grid": args.s_grid}]}
        m_max = 2 if args.m_max is None else args.m_max
        return {"checks": [{"kind": "ohno-integer", "weight_max": args.weight_max, "m_max": m_max}]}
    checks = []
    if args.s_grid is not None:
        checks.append({"kind": "ohno-interp", "index": args.index, "s_grid": args.s_grid})
    if args.m_max is not None:
        checks.append({"kind": "ohno-integer", "index": args.index, "m_max": args.m_max})
    if not checks:
        raise UsageError("--index needs --s-grid and/or --m-max")
    return {"checks": checks}


def cmd_verify(args, out, err) -> int:
    suite = _suite_from_args(args)
    ctx = _fixed_context(args)
    count = failures = 0
    for report in iter_suite(suite, ctx, workers=args.threads):
        count += 1
        failures += not report.passed
        print(report_line(report), file=out, flush=True)
    print(f"{count} checks, {failures} failed", file=err)
    return EXIT_OK if failures == 0 else EXIT_FAIL


def _sweep_point(payload):
    k, s, ctx = payload
    return interp_eval(k, s, ctx)


SWEEP_COLUMNS = ("re_s", "im_s", "re_val", "im_val", "err", "N")


def cmd_sweep(args, out, err) -> int:
    k = require_admissible(parse_index(args.index))
    grid = parse_grid(args.s_grid)
    ctx = _fixed_context(args)
    payloads = [(k, s, ctx) for s in grid]
    if args.threads > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            evs = list(pool.map(_sweep_point, payloads))
    else:
        evs = [_sweep_point(p) for p in payloads]
    rows = []
    for s, ev in zip(grid, evs):
        re_s, im_s = s.split(",")
        rows.append({"re_s": re_s, "im_s": im_s, "re_val": str(ev.value.real), "im_val": str(ev.value.imag),
                     "err": str(ev.error_estimate), "N": ev.terms_used})
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps({"index": format_index(k), "columns": list(SWEEP_COLUMNS), "rows": rows}) + "\n"
    with open(args.out, "w", newline="") as fh:
        fh.write(text)
    print(f"wrote {len(rows)} rows to {args.out}", file=err)
    return EXIT_OK


COMMANDS = {
    "dual": cmd_dual,
    "zeta": cmd_zeta,
    "interp": cmd_interp,
    "ohno-sum": cmd_ohno_sum,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(_fix_negative_values(argv))
        return COMMANDS[args.command](args, out, err)
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_USAGE
    except (ConfigError, InvalidInputError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except OhnoZetaError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
