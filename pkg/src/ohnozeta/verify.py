"""Relation checks and batch suites.

Every check returns a :class:`RelationReport`.  Identities that involve
limits are judged against the sum of the two heuristic error estimates;
identities that hold exactly at finite truncation are judged against the
rounding budget ``2**-(bits-16) * max(|lhs|, 1)`` only.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Any, Iterable, Iterator

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import ConfigError, InvalidInputError, OhnoZetaError
from .index import (
    admissible_up_to,
    as_index,
    compositions,
    dual,
    format_index,
    require_admissible,
    shifted,
)
from .interp import interp_eval, interp_mform, interp_truncated, lemma21_lhs, lemma21_rhs
from .precision import GUARD_BITS, SAFETY_FACTOR, Evaluation, PrecisionContext, clamp_ratio, round_to, to_mpc
from .series import adaptive, default_cap, harmonic_residual, mzf_estimate, zeta_truncated

KINDS = ("ohno-integer", "ohno-interp", "harmonic", "lemma21", "lemma22-exact", "mform-oracle")


@dataclass(frozen=True)
class RelationReport:
    kind: str
    inputs: dict
    lhs: Evaluation
    rhs: Evaluation
    residual: mpfr
    tolerance: mpfr

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "inputs": self.inputs,
            "lhs": evaluation_dict(self.lhs),
            "rhs": evaluation_dict(self.rhs),
            "residual": str(self.residual),
            "tolerance": str(self.tolerance),
            "verdict": self.verdict,
        }


def evaluation_dict(ev: Evaluation) -> dict:
    return {
        "value": complex_dict(ev.value),
        "error_estimate": str(ev.error_estimate),
        "terms_used": ev.terms_used,
        "cancellation_ratio": str(ev.cancellation_ratio),
        "heuristic": ev.heuristic,
    }


def complex_dict(z) -> dict:
    if not isinstance(z, type(mpc(0))):
        z = mpc(z)
    return {"re": str(z.real), "im": str(z.imag)}


def exact(value, N: int, bits: int) -> Evaluation:
    """Wrap a finite-truncation value (no tail, so no error estimate)."""
    with gmpy2.context(precision=bits):
        return Evaluation(mpc(value), mpfr(0), N, mpfr(1), heuristic=False)


def _residual(lhs, rhs, bits: int) -> mpfr:
    with gmpy2.context(precision=bits):
        return abs(mpc(lhs) - mpc(rhs))


def _rounding_tolerance(lhs, ctx: PrecisionContext) -> mpfr:
    with gmpy2.context(precision=ctx.bits):
        return ctx.rounding_budget * max(abs(mpc(lhs)), mpfr(1))


def _tail_tolerance(a: Evaluation, b: Evaluation, bits: int) -> mpfr:
    with gmpy2.context(precision=bits):
        return a.error_estimate + b.error_estimate


# -- Ohno sums -------------------------------------------------------------

def ohno_sum(k, m: int, ctx: PrecisionContext = PrecisionContext()) -> Evaluation:
    """``sum_{|e|=m} zeta(k+e)``, all summands extrapolated at one shared N."""
    k = require_admissible(k)
    m = _nonneg(m, "m")
    indices = [shifted(k, e) for e in compositions(len(k), m)]
    bits = ctx.bits

    def at(N):
        estimates = [mzf_estimate(kk, N, bits) for kk in indices]
        with gmpy2.context(precision=bits + GUARD_BITS):
            high = sum((mpc(e.high) for e in estimates), mpc(0))
            low = sum((mpc(e.low) for e in estimates), mpc(0))
            err = SAFETY_FACTOR * abs(high - low)
            biggest = max(abs(mpc(e.high)) for e in estimates)
            ratio = clamp_ratio(biggest, high, bits)
        return Evaluation(round_to(high, bits), round_to(err, bits), N, round_to(ratio, bits))

    return adaptive(at, ctx, default_cap(len(k)))


def _nonneg(m, name: str) -> int:
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise InvalidInputError(f"{name} must be a nonnegative integer, got {m!r}")
    return int(m)


def check_ohno_integer(k, m: int, ctx: PrecisionContext = PrecisionContext()) -> RelationReport:
    k = require_admissible(k)
    kd = dual(k)
    lhs = ohno_sum(k, m, ctx)
    rhs = lhs if kd == k else ohno_sum(kd, m, ctx)
    return RelationReport(
        "ohno-integer",
        {"index": format_index(k), "dual": format_index(kd), "m": int(m), "bits": ctx.bits},
        lhs, rhs, _residual(lhs.value, rhs.value, ctx.bits), _tail_tolerance(lhs, rhs, ctx.bits),
    )


def check_ohno_interp(k, s, ctx: PrecisionContext = PrecisionContext()) -> RelationReport:
    k = require_admissible(k)
    kd = dual(k)
    text = s if isinstance(s, str) else None
    lhs = interp_eval(k, s, ctx)
    rhs = lhs if kd == k else interp_eval(kd, s, ctx)
    return RelationReport(
        "ohno-interp",
        {"index": format_index(k), "dual": format_index(kd), "s": _s_echo(s, text, ctx.bits),
         "bits": ctx.bits},
        lhs, rhs, _residual(lhs.value, rhs.value, ctx.bits), _tail_tolerance(lhs, rhs, ctx.bits),
    )


def check_lemma22_exact(k, m: int, N: int, ctx: PrecisionContext = PrecisionContext()) -> RelationReport:
    """Truncated I_k(m) against the composition sum of truncated MZVs at the same N."""
    k = require_admissible(k)
    m = _nonneg(m, "m")
    left = interp_truncated(k, m, N, ctx)
    with gmpy2.context(precision=ctx.bits + GUARD_BITS):
        right = mpc(0)
        for e in compositions(len(k), m):
            right += zeta_truncated(shifted(k, e), N, PrecisionContext(bits=ctx.bits + GUARD_BITS))
    right = round_to(right, ctx.bits)
    lhs, rhs = exact(left, N, ctx.bits), exact(right, N, ctx.bits)
    return RelationReport(
        "lemma22-exact",
        {"index": format_index(k), "m": m, "N": int(N), "bits": ctx.bits},
        lhs, rhs, _residual(left, right, ctx.bits), _rounding_tolerance(left, ctx),
    )


def check_mform(k, s, N: int, ctx: PrecisionContext = PrecisionContext()) -> RelationReport:
    """Factorised truncated I_k(s) against the brute-force m-coordinate sum."""
    k = require_admissible(k)
    text = s if isinstance(s, str) else None
    left = interp_truncated(k, s, N, ctx)
    right = interp_mform(k, s, N, ctx)
    lhs, rhs = exact(left, N, ctx.bits), exact(right, N, ctx.bits)
    return RelationReport(
        "mform-oracle",
        {"index": format_index(k), "s": _s_echo(s, text, ctx.bits), "N": int(N), "bits": ctx.bits},
        lhs, rhs, _residual(left, right, ctx.bits), _rounding_tolerance(left, ctx),
    )


def check_harmonic(s1, s2, ctx: PrecisionContext = PrecisionContext()) -> RelationReport:
    res = harmonic_residual(s1, s2, ctx)
    return RelationReport(
        "harmonic",
        {"s1": _s_echo(s1, s1 if isinstance(s1, str) else None, ctx.bits),
         "s2": _s_echo(s2, s2 if isinstance(s2, str) else None, ctx.bits),
         "N": res.terms_used, "bits": ctx.bits},
        res.lhs, res.rhs, res.residual, res.error_estimate,
    )


def check_lemma21(a, m: int, ctx: PrecisionContext = PrecisionContext()) -> RelationReport:
    left = lemma21_lhs(a, m, ctx)
    right = lemma21_rhs(a, m, ctx)
    lhs, rhs = exact(left, 1, ctx.bits), exact(right, 1, ctx.bits)
    return RelationReport(
        "lemma21",
        {"a": [str(x) for x in a], "m": int(m), "bits": ctx.bits},
        lhs, rhs, _residual(left, right, ctx.bits), _rounding_tolerance(left, ctx),
    )


def _s_echo(s, text, bits: int) -> dict:
    """Echo s as decimal strings that re-parse to the same value."""
    if text is not None:
        fields = [f.strip() for f in text.split(",")]
        if len(fields) == 1:
            fields.append("0")
        return {"re": fields[0], "im": fields[1]}
    z = to_mpc(s, bits + GUARD_BITS)
    return {"re": str(z.real), "im": str(z.imag)}


# -- grids and suites ------------------------------------------------------

def parse_range(text: str) -> list[str]:
    """``"a:b:step"`` (inclusive) or a single value, as exact decimal strings."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [str(Decimal(parts[0]))]
        if len(parts) != 3:
            raise ConfigError(f"range must be a:b:step, got {text!r}")
        a, b, step = (Decimal(p) for p in parts)
    except InvalidOperation:
        raise ConfigError(f"cannot parse range {text!r}") from None
    if step <= 0:
        raise ConfigError(f"range step must be positive, got {text!r}")
    out = []
    x = a
    while x <= b:
        out.append(str(x))
        x += step
    return out


def parse_grid(spec: str) -> list[str]:
    """``"re=a:b:step,im=c:d:step"`` into ``"RE,IM"`` strings, re-major order.

    An empty spec gives an empty grid.
    """
    spec = spec.strip()
    if not spec:
        return []
    axes = {"re": ["0"], "im": ["0"]}
    seen = set()
    for field in spec.split(","):
        if "=" not in field:
            raise ConfigError(f"grid field must look like re=a:b:step, got {field!r}")
        name, rng = (t.strip() for t in field.split("=", 1))
        if name not in axes or name in seen:
            raise ConfigError(f"unknown or repeated grid axis {name!r}")
        seen.add(name)
        axes[name] = parse_range(rng)
    return [f"{re},{im}" for re in axes["re"] for im in axes["im"]]


def _index_list(entry: dict) -> list:
    if "index" in entry:
        raw = entry["index"]
        if isinstance(raw, list) and raw and all(isinstance(x, (list, str)) for x in raw):
            return [as_index(x) for x in raw]
        return [as_index(raw)]
    if "weight_max" in entry:
        w = entry["weight_max"]
        d = entry.get("depth_max")
        if not isinstance(w, int) or (d is not None and not isinstance(d, int)):
            raise ConfigError("weight_max/depth_max must be integers")
        return list(admissible_up_to(w, d))
    raise ConfigError("check needs 'index' or 'weight_max'")


def _m_list(entry: dict) -> list[int]:
    if "m" in entry:
        raw = entry["m"]
        vals = raw if isinstance(raw, list) else [raw]
    elif "m_max" in entry:
        vals = list(range(int(entry["m_max"]) + 1))
    else:
        raise ConfigError("check needs 'm' or 'm_max'")
    if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in vals):
        raise ConfigError("m values must be nonnegative integers")
    return vals


def _s_list(entry: dict) -> list[str]:
    if "s_grid" in entry:
        return parse_grid(str(entry["s_grid"]))
    if "s" in entry:
        raw = entry["s"]
        return [str(v) for v in (raw if isinstance(raw, list) else [raw])]
    raise ConfigError("check needs 's' or 's_grid'")


def expand_suite(suite: Any) -> list[tuple]:
    """Flatten a suite description into ``(kind, args)`` tasks in suite order.

    A suite is ``{"checks": [entry, ...]}``; each entry has a ``kind`` and
    either explicit inputs or weight/depth bounds for exhaustive generation.
    """
    if not isinstance(suite, dict) or not isinstance(suite.get("checks", None), list):
        raise ConfigError("suite must be an object with a 'checks' list")
    tasks = []
    for entry in suite["checks"]:
        if not isinstance(entry, dict):
            raise ConfigError("each check must be an object")
        kind = entry.get("kind")
        try:
            if kind == "ohno-integer":
                tasks += [(kind, (k, m)) for k in _index_list(entry) for m in _m_list(entry)]
            elif kind == "ohno-interp":
                tasks += [(kind, (k, s)) for k in _index_list(entry) for s in _s_list(entry)]
            elif kind == "lemma22-exact":
                N = int(entry.get("N", 200))
                tasks += [(kind, (k, m, N)) for k in _index_list(entry) for m in _m_list(entry)]
            elif kind == "mform-oracle":
                N = int(entry.get("N", 60))
                tasks += [(kind, (k, s, N)) for k in _index_list(entry) for s in _s_list(entry)]
            elif kind == "harmonic":
                tasks.append((kind, (str(entry["s1"]), str(entry["s2"]))))
            elif kind == "lemma21":
                a = entry["a"]
                if not isinstance(a, list):
                    raise ConfigError("lemma21 'a' must be a list")
                tasks += [(kind, ([str(x) for x in a], m)) for m in _m_list(entry)]
            else:
                raise ConfigError(f"unknown check kind {kind!r}; expected one of {', '.join(KINDS)}")
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed {kind} check: {exc}") from None
    return tasks


_CHECKS = {
    "ohno-integer": check_ohno_integer,
    "ohno-interp": check_ohno_interp,
    "lemma22-exact": check_lemma22_exact,
    "mform-oracle": check_mform,
    "harmonic": check_harmonic,
    "lemma21": check_lemma21,
}


def run_task(task, ctx: PrecisionContext) -> RelationReport:
    kind, args = task
    return _CHECKS[kind](*args, ctx)


def _run_task_star(payload):
    task, ctx = payload
    return run_task(task, ctx)


def iter_suite(suite: Any, ctx: PrecisionContext = PrecisionContext(), workers: int = 1) -> Iterator[RelationReport]:
    """Yield reports in suite order; with ``workers > 1`` checks run in subprocesses."""
    tasks = expand_suite(suite)
    if workers <= 1 or len(tasks) <= 1:
        for task in tasks:
            yield run_task(task, ctx)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_run_task_star, [(t, ctx) for t in tasks])


def run_suite(suite: Any, ctx: PrecisionContext = PrecisionContext(), workers: int = 1) -> list[RelationReport]:
    return list(iter_suite(suite, ctx, workers))


def load_suite(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read suite {path}: {exc}") from None


def all_passed(reports: Iterable[RelationReport]) -> bool:
    return all(r.passed for r in reports)


def report_line(report: RelationReport) -> str:
    return json.dumps(report.to_dict(), separators=(",", ":"))


__all__ = [
    "ConfigError", "OhnoZetaError", "RelationReport", "all_passed", "check_harmonic",
    "check_lemma21", "check_lemma22_exact", "check_mform", "check_ohno_integer",
    "check_ohno_interp", "expand_suite", "iter_suite", "load_suite", "ohno_sum",
    "parse_grid", "report_line", "run_suite",
]
