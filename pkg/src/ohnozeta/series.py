"""Truncated and extrapolated multiple zeta sums.

The truncated multiple zeta function

    zeta_N(s_1, ..., s_r) = sum_{1 <= n_1 < ... < n_r <= N} n_1**-s_1 ... n_r**-s_r

is computed by ascending prefix sums over nesting levels: level j at n is
``n**-s_j`` times the level j-1 prefix sum up to n-1.  One pass gives the
truncations of every prefix ``(s_1..s_j)`` for every cutoff ``n <= N``,
which is exactly what the limit fit in :mod:`ohnozeta.extrapolate` consumes.
"""
from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple, Sequence

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from . import extrapolate
from .errors import ConvergenceError, InvalidInputError, OutsideDomainError
from .index import as_index, format_index, require_admissible
from .precision import (
    GUARD_BITS,
    SAFETY_FACTOR,
    Evaluation,
    PrecisionContext,
    clamp_ratio,
    complex_power_table,
    finite_or_raise,
    lost_bits,
    power_table,
    round_to,
    to_mpc,
)

START_TERMS = 256
CAP_SHALLOW = 10**6
CAP_DEEP = 10**5


def default_cap(depth: int) -> int:
    return CAP_SHALLOW if depth <= 2 else CAP_DEEP


def head_terms(depth: int) -> int:
    """Powers of 1/N fitted per tail in the head model."""
    return max(4, min(10, 36 // depth))


# -- truncated sums --------------------------------------------------------

def _term_tables(exponents, N: int, prec: int, absolute: bool = False):
    tables = []
    for s in exponents:
        if isinstance(s, int):
            tables.append(power_table(N, -s, prec)[: N + 1])
        elif absolute:
            tables.append(complex_power_table(N, mpc(s.real), prec)[: N + 1])
        else:
            tables.append(complex_power_table(N, s, prec))
    return tables


def prefix_levels(exponents, N: int, prec: int, absolute: bool = False) -> list[np.ndarray]:
    """``levels[j][n] = zeta_n(s_1..s_j)`` for ``j = 0..r`` and ``n = 0..N``.

    Integer exponents use exact-power tables, complex ones ``exp(-s ln n)``.
    With ``absolute`` every term is replaced by its modulus.
    """
    with gmpy2.context(precision=prec):
        tables = _term_tables(exponents, N, prec, absolute)
        zero = mpfr(0)
        levels = [np.array([mpfr(1)] * (N + 1), dtype=object)]
        for table in tables:
            prev = levels[-1]
            terms = table[1:] * prev[:-1]
            if len(levels) == 1:
                terms = table[1:].copy()
            level = np.empty(N + 1, dtype=object)
            level[0] = zero
            level[1:] = np.cumsum(terms)
            levels.append(level)
        return levels


def _normalise_exponents(s: Sequence) -> tuple:
    out = []
    for x in s:
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            out.append(int(x))
        else:
            out.append(x)
    return tuple(out)


def check_domain(s: Sequence, delta: float) -> None:
    """Reject ``s`` unless ``Re(s_l + ... + s_r) > r - l + 1 + delta`` for every l.

    The smallest failing l is reported.
    """
    r = len(s)
    if r == 0:
        raise InvalidInputError("empty argument list")
    tails = [0] * (r + 1)
    for l in range(r, 0, -1):
        tails[l - 1] = tails[l] + (s[l - 1].real if isinstance(s[l - 1], mpc) else s[l - 1])
    for l in range(1, r + 1):
        if not tails[l - 1] > r - l + 1 + delta:
            raise OutsideDomainError(
                f"outside convergence domain: Re(s_{l} + ... + s_{r}) = {float(tails[l - 1]):.6g} "
                f"<= {r - l + 1} + margin {delta}",
                position=l,
            )


def _truncated(exponents, N: int, bits: int):
    """Sum at cutoff N with guard bits raised until cancellation is covered."""
    guard = GUARD_BITS
    while True:
        prec = bits + guard
        value = prefix_levels(exponents, N, prec)[-1][N]
        if all(isinstance(x, int) for x in exponents):
            return round_to(value, bits)
        size = prefix_levels(exponents, N, prec, absolute=True)[-1][N]
        lost = lost_bits(size, value)
        if lost + 16 <= guard or guard > 4 * bits:
            return round_to(value, bits)
        guard = lost + 32


def zeta_truncated(k, N: int, ctx: PrecisionContext = PrecisionContext()) -> mpc:
    """``zeta_N(k)`` for an admissible integer index, rounded to ``ctx.bits``.

    >>> zeta_truncated((2,), 3)
    mpc('1.361111111111111111111111111111111111108+0.0j',(128,128))
    """
    k = require_admissible(k)
    N = _check_cutoff(N, len(k))
    with gmpy2.context(precision=ctx.bits):
        return mpc(_truncated(k, N, ctx.bits))


def mzf_complex(s: Sequence, N: int, ctx: PrecisionContext = PrecisionContext()) -> mpc:
    """Truncated multiple zeta function at complex arguments.

    Every argument must lie in the region of absolute convergence with
    margin ``ctx.delta``; otherwise :class:`OutsideDomainError` names the
    failing position l.
    """
    s = _complex_args(s, ctx.bits)
    check_domain(s, ctx.delta)
    N = _check_cutoff(N, len(s))
    with gmpy2.context(precision=ctx.bits):
        return mpc(_truncated(_normalise_exponents(_integral(s)), N, ctx.bits))


def _check_cutoff(N, r: int) -> int:
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise InvalidInputError(f"truncation must be a positive integer, got {N!r}")
    if N < r:
        raise InvalidInputError(f"truncation N={N} is smaller than depth {r}")
    return int(N)


def _complex_args(s, bits: int) -> list[mpc]:
    if isinstance(s, (str, bytes)) or not hasattr(s, "__iter__"):
        s = [s]
    out = [to_mpc(x, bits + GUARD_BITS) for x in s]
    if not out:
        raise InvalidInputError("empty argument list")
    return out


def _integral(s: list[mpc]) -> list:
    """Replace arguments that are exact integers by ``int`` (exact power tables)."""
    out = []
    for z in s:
        if z.imag == 0 and gmpy2.is_integer(z.real):
            out.append(int(z.real))
        else:
            out.append(z)
    return out


# -- extrapolated limits ---------------------------------------------------

class Estimate(NamedTuple):
    """Limit estimates from windows ending at N and N/2, plus diagnostics."""

    high: object
    low: object
    size: object
    N: int


@lru_cache(maxsize=4096)
def mzf_estimate(exponents: tuple, N: int, bits: int) -> Estimate:
    """Extrapolated limit of ``zeta_n(exponents)`` from partial sums with ``n <= N``.

    Pure function of its arguments; cached so Ohno sums sharing summands
    across a verification run reuse them.
    """
    prec = bits + 2 * GUARD_BITS
    levels = prefix_levels(exponents, N, prec)
    r = len(exponents)
    seq = levels[-1]
    sizes = prefix_levels(exponents, N, prec, absolute=True)[-1] if not all(
        isinstance(x, int) for x in exponents) else seq
    sigmas = []
    with gmpy2.context(precision=prec):
        for j in range(r):
            tail = sum((mpc(x) for x in exponents[j:]), mpc(0))
            sigmas.append(tail - (r - j))
    heads = levels[:-1]
    ls_prec = 2 * prec + 64
    estimates = []
    for hi in (N, N // 2):
        P = extrapolate.terms_for_budget(r, hi, head_terms(r))
        if P == 0:
            estimates.append(seq[hi])
        else:
            estimates.append(extrapolate.fit_heads(seq, heads, sigmas, P, hi, ls_prec))
    return Estimate(estimates[0], estimates[1], sizes[N], N)


def evaluation_from(estimate: Estimate, bits: int, size=None) -> Evaluation:
    with gmpy2.context(precision=bits + GUARD_BITS):
        value = mpc(estimate.high)
        err = SAFETY_FACTOR * abs(mpc(estimate.high) - mpc(estimate.low))
        ratio = clamp_ratio(estimate.size if size is None else size, value, bits)
    finite_or_raise(value, "evaluation")
    return Evaluation(
        value=round_to(value, bits),
        error_estimate=round_to(err, bits),
        terms_used=estimate.N,
        cancellation_ratio=round_to(ratio, bits),
    )


def adaptive(evaluate_at, ctx: PrecisionContext, cap: int, start: int = START_TERMS) -> Evaluation:
    """Double N from ``start`` until the error estimate meets ``ctx.target``.

    ``evaluate_at(N)`` must return an :class:`Evaluation`.  In fixed mode
    (``ctx.terms`` set) a single evaluation at that N is returned.
    """
    if ctx.max_terms is not None:
        cap = ctx.max_terms
    if not ctx.adaptive:
        return evaluate_at(ctx.terms)
    N = min(start, cap)
    best = None
    while True:
        ev = evaluate_at(N)
        if best is None or ev.error_estimate <= best.error_estimate:
            best = ev
        if ev.error_estimate <= ctx.target:
            return ev
        if 2 * N > cap:
            raise ConvergenceError(
                f"error estimate {float(ev.error_estimate):.3g} above target {ctx.target:.3g} "
                f"at truncation cap N={N}",
                best=best,
            )
        N *= 2


def zeta(k, ctx: PrecisionContext = PrecisionContext()) -> Evaluation:
    """Multiple zeta value of an admissible index with a heuristic error estimate.

    The value is a least-squares extrapolation of the truncated sums; the
    error estimate is ``10 * |A(N) - A(N/2)|`` where ``A(M)`` only uses
    partial sums up to M.
    """
    k = require_admissible(k)
    return adaptive(lambda N: evaluation_from(mzf_estimate(k, N, ctx.bits), ctx.bits),
                    ctx, default_cap(len(k)))


def mzf(s: Sequence, ctx: PrecisionContext = PrecisionContext()) -> Evaluation:
    """Multiple zeta function at complex arguments inside the convergence domain."""
    s = _complex_args(s, ctx.bits)
    check_domain(s, ctx.delta)
    exps = _normalise_exponents(_integral(s))
    return adaptive(lambda N: evaluation_from(mzf_estimate(exps, N, ctx.bits), ctx.bits),
                    ctx, default_cap(len(s)))


class HarmonicResidual(NamedTuple):
    residual: mpfr
    error_estimate: mpfr
    terms_used: int
    lhs: Evaluation
    rhs: Evaluation


def harmonic_residual(s1, s2, ctx: PrecisionContext = PrecisionContext()) -> HarmonicResidual:
    """Residual of ``zeta(s1) zeta(s2) = zeta(s1,s2) + zeta(s2,s1) + zeta(s1+s2)``.

    All four values share one truncation N.  The two depth-2 terms are
    added in a canonical order so swapping ``s1`` and ``s2`` reproduces the
    residual bit for bit.
    """
    a, b = _complex_args([s1, s2], ctx.bits)
    for name, z in (("s1", a), ("s2", b)):
        if not z.real > 1 + ctx.delta:
            raise OutsideDomainError(
                f"outside convergence domain: Re({name}) = {float(z.real):.6g} <= 1 + margin {ctx.delta}",
                position=None,
            )
    a, b = sorted((a, b), key=lambda z: (z.real, z.imag))
    with gmpy2.context(precision=ctx.bits + GUARD_BITS):
        total = a + b
    parts = [_normalise_exponents(_integral(x)) for x in ([a], [b], [a, b], [b, a], [total])]
    bits = ctx.bits

    def at(N):
        evs = [evaluation_from(mzf_estimate(p, N, bits), bits) for p in parts]
        return evs

    result = {}

    def evaluate_at(N):
        evs = at(N)
        za, zb, zab, zba, zsum = evs
        with gmpy2.context(precision=bits + GUARD_BITS):
            lhs_v = za.value * zb.value
            rhs_v = zab.value + zba.value + zsum.value
            lhs_err = abs(za.value) * zb.error_estimate + abs(zb.value) * za.error_estimate \
                + za.error_estimate * zb.error_estimate
            rhs_err = zab.error_estimate + zba.error_estimate + zsum.error_estimate
            ratio = max(abs(zab.value), abs(zba.value), abs(zsum.value))
        lhs = Evaluation(round_to(lhs_v, bits), round_to(lhs_err, bits), N, mpfr(1))
        rhs = Evaluation(round_to(rhs_v, bits), round_to(rhs_err, bits), N,
                         round_to(clamp_ratio(ratio, rhs_v, bits), bits))
        result["pair"] = (lhs, rhs)
        with gmpy2.context(precision=bits):
            return Evaluation(mpc(lhs_v - rhs_v), lhs.error_estimate + rhs.error_estimate, N, mpfr(1))

    ev = adaptive(evaluate_at, ctx, default_cap(2))
    lhs, rhs = result["pair"]
    with gmpy2.context(precision=bits):
        return HarmonicResidual(abs(ev.value), ev.error_estimate, ev.terms_used, lhs, rhs)


def describe(k) -> str:
    return f"({format_index(as_index(k))})"
