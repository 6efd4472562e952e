"""The interpolated Ohno function

    I_k(s) = sum_i sum_{0<n_1<...<n_r} n_1**-k_1 ... n_r**-k_r * n_i**-s
             * prod_{j != i} n_j / (n_j - n_i),

its truncations, the partial-fraction identity behind it, and a brute-force
evaluator in the coordinates ``n_i = m_1 + ... + m_i``.

For a fixed pivot position i and pivot value n, the tuple sum factorises
into a lower chain ``n_1 < ... < n_{i-1} < n`` and an upper chain
``n < n_{i+1} < ... < n_r``, each weighted per variable by
``n_j**(1-k_j) / (n_j - n)``.  Both chains are prefix-sum recursions, so the
truncated sum costs O(r N^2) rather than O(N^r).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from . import extrapolate
from .errors import CapabilityError, InvalidInputError, OutsideDomainError
from .index import compositions, require_admissible
from .precision import (
    GUARD_BITS,
    Evaluation,
    PrecisionContext,
    clamp_ratio,
    integers,
    is_real_integer,
    log_table,
    lost_bits,
    power_table,
    round_to,
    to_mpc,
    to_mpfr,
)
from .series import Estimate, adaptive, evaluation_from

INTERP_CAP = 4096
MFORM_MAX_DEPTH = 3
MFORM_MAX_TERMS = 200


def interp_terms(depth: int) -> int:
    """Powers of 1/N fitted per exponent family in the power-log model."""
    return 6 if depth <= 3 else 5


# -- partial fractions -----------------------------------------------------

def pf_weight(n: Sequence[int], i: int, ctx: PrecisionContext = PrecisionContext()) -> mpfr:
    """Pivot weight ``prod_{j != i} n_j / (n_j - n_i)`` (``i`` is 1-based).

    Evaluated exactly in rationals, then rounded once to ``ctx.bits``.

    >>> float(pf_weight((1, 2, 3), 2))
    -3.0
    """
    n = _increasing(n)
    if isinstance(i, bool) or int(i) != i or not 1 <= i <= len(n):
        raise InvalidInputError(f"pivot position must be in 1..{len(n)}, got {i!r}")
    pivot = n[i - 1]
    w = Fraction(1)
    for j, nj in enumerate(n, start=1):
        if j != i:
            w *= Fraction(nj, nj - pivot)
    with gmpy2.context(precision=ctx.bits):
        return mpfr(gmpy2.mpq(w.numerator, w.denominator))


def _increasing(n) -> tuple[int, ...]:
    n = tuple(n)
    if not n:
        raise InvalidInputError("empty tuple")
    for x in n:
        if isinstance(x, bool) or int(x) != x or x < 1:
            raise InvalidInputError(f"entries must be positive integers, got {x!r}")
    if any(b <= a for a, b in zip(n, n[1:])):
        raise InvalidInputError(f"tuple must be strictly increasing, got {n}")
    return tuple(int(x) for x in n)


def _distinct_nodes(a, prec: int) -> list[mpfr]:
    nodes = [to_mpfr(x, prec) for x in a]
    if not nodes:
        raise InvalidInputError("need at least one node")
    if len(set(nodes)) != len(nodes):
        raise InvalidInputError("nodes must be pairwise distinct")
    return nodes


def _check_power(m) -> int:
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise InvalidInputError(f"m must be a nonnegative integer, got {m!r}")
    return int(m)


def _with_guard(terms_at, bits: int):
    """Sum the terms produced by ``terms_at(prec)``, raising precision on cancellation."""
    guard = GUARD_BITS
    while True:
        prec = bits + guard
        with gmpy2.context(precision=prec):
            terms = terms_at(prec)
            total = sum(terms, mpfr(0))
            size = sum((abs(t) for t in terms), mpfr(0))
        lost = lost_bits(size, total)
        if lost + 16 <= guard or guard > 8 * bits:
            return round_to(total, bits)
        guard = min(lost + 32, 8 * bits + 1)


def lemma21_lhs(a, m: int, ctx: PrecisionContext = PrecisionContext()) -> mpfr:
    """``sum_{e_1+...+e_r=m} a_1**e_1 ... a_r**e_r`` by enumerating compositions."""
    m = _check_power(m)
    _distinct_nodes(a, ctx.bits)

    def terms(prec):
        nodes = [to_mpfr(x, prec) for x in a]
        out = []
        for e in compositions(len(nodes), m):
            t = mpfr(1)
            for x, p in zip(nodes, e):
                t *= x ** p
            out.append(t)
        return out

    return _with_guard(terms, ctx.bits)


def lemma21_rhs(a, m: int, ctx: PrecisionContext = PrecisionContext()) -> mpfr:
    """Closed form ``sum_i a_i**(m+r-1) prod_{j != i} (a_i - a_j)**-1``."""
    m = _check_power(m)
    _distinct_nodes(a, ctx.bits)

    def terms(prec):
        nodes = [to_mpfr(x, prec) for x in a]
        r = len(nodes)
        out = []
        for i, ai in enumerate(nodes):
            t = ai ** (m + r - 1)
            for j, aj in enumerate(nodes):
                if j != i:
                    t /= ai - aj
            out.append(t)
        return out

    return _with_guard(terms, ctx.bits)


# -- truncated interpolation -----------------------------------------------

def _check_s(s, ctx: PrecisionContext) -> mpc:
    s = to_mpc(s, ctx.bits + GUARD_BITS)
    if not s.real > -1 + ctx.delta:
        raise OutsideDomainError(
            f"outside convergence domain: Re(s) = {float(s.real):.6g} <= -1 + margin {ctx.delta}; "
            "continuation below Re(s) = -1 is not supported",
            position=None,
        )
    return s


def _check_cutoff(N, r: int) -> int:
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise InvalidInputError(f"truncation must be a positive integer, got {N!r}")
    if N < r:
        raise InvalidInputError(f"truncation N={N} is smaller than depth {r}")
    return int(N)


def _pivot_power(n: int, s: mpc, prec: int):
    """``n**-s`` as an mpfr when s is real, else an mpc."""
    with gmpy2.context(precision=prec):
        ln = log_table(n, prec)[n]
        if s.imag == 0:
            if gmpy2.is_integer(s.real):
                return mpfr(n) ** (-int(s.real))
            return gmpy2.exp(-s.real * ln)
        return gmpy2.exp(-s * ln)


def _chain_tables(k, N: int, prec: int):
    """``x**(1-k_j)`` tables for every position j."""
    return [power_table(N, 1 - kj, prec)[: N + 1] for kj in k]


def _lower_sums(k, n: int, X, tables, prec: int) -> list:
    """``L_i(n)`` for i = 0..r-1 (0-based pivot position); ``L_0 = 1``.

    ``L_i(n) = sum_{x_0 < ... < x_{i-1} < n} prod_j x_j**(1-k_j) / (x_j - n)``.
    """
    r = len(k)
    out = [mpfr(1)] + [mpfr(0)] * (r - 1)
    if n <= 1 or r == 1:
        return out
    recip = 1 / (X[1:n] - n)
    prefix = None
    for j in range(r - 1):
        factor = tables[j][1:n] * recip
        if prefix is None:
            terms = factor
        else:
            terms = np.empty(n - 1, dtype=object)
            terms[0] = mpfr(0)
            terms[1:] = factor[1:] * prefix[:-1]
        prefix = np.cumsum(terms)
        out[j + 1] = prefix[-1]
    return out


def _upper_sums(k, n: int, N: int, X, tables, prec: int) -> list:
    """``U_i(n)`` for i = 0..r-1 with every upper variable at most N; ``U_{r-1} = 1``.

    ``U_i(n) = sum_{n < x_{i+1} < ... < x_{r-1} <= N} prod_j x_j**(1-k_j) / (x_j - n)``,
    built from the top position downwards with suffix sums.
    """
    r = len(k)
    out = [mpfr(0)] * (r - 1) + [mpfr(1)]
    if n >= N or r == 1:
        return out
    recip = 1 / (X[n + 1:N + 1] - n)
    suffix = None
    for j in range(r - 1, 0, -1):
        factor = tables[j][n + 1:N + 1] * recip
        if suffix is None:
            terms = factor
        else:
            terms = np.empty(N - n, dtype=object)
            terms[-1] = mpfr(0)
            terms[:-1] = factor[:-1] * suffix[1:]
        suffix = np.cumsum(terms[::-1])[::-1]
        out[j - 1] = suffix[0]
    return out


def _pivot_partials(k, s: mpc, N: int, prec: int):
    """Per-pivot partial sums of the truncated series plus the sum of |terms|."""
    r = len(k)
    X = integers(N, prec)[: N + 1]
    with gmpy2.context(precision=prec):
        tables = _chain_tables(k, N, prec)
        real = s.imag == 0
        zero = mpfr(0) if real else mpc(0)
        partials = [zero] * r
        size = mpfr(0)
        for n in range(1, N + 1):
            lower = _lower_sums(k, n, X, tables, prec)
            upper = _upper_sums(k, n, N, X, tables, prec)
            ps = _pivot_power(n, s, prec)
            ps_abs = abs(ps)
            for i in range(r):
                core = lower[i] * upper[i]
                if core == 0:
                    continue
                scale = mpfr(n) ** (-k[i])
                partials[i] += scale * core * ps
                size += scale * abs(core) * ps_abs
        return partials, size


def pivot_partials(k, s, N: int, ctx: PrecisionContext = PrecisionContext()) -> list:
    """Pivot-i partial sums of the truncated I_k(s), i = 1..r, rounded to ``ctx.bits``."""
    k = require_admissible(k)
    s = _check_s(s, ctx)
    N = _check_cutoff(N, len(k))
    partials, _ = _pivot_partials(k, s, N, ctx.bits + GUARD_BITS)
    return [round_to(mpc(p), ctx.bits) for p in partials]


def interp_truncated(k, s, N: int, ctx: PrecisionContext = PrecisionContext()) -> mpc:
    """Truncated I_k(s): every ``n_j <= N``, pivots combined in ascending order.

    Working precision is raised when the alternating pivot partials cancel.
    """
    k = require_admissible(k)
    s = _check_s(s, ctx)
    N = _check_cutoff(N, len(k))
    guard = GUARD_BITS
    while True:
        prec = ctx.bits + guard
        partials, size = _pivot_partials(k, s, N, prec)
        with gmpy2.context(precision=prec):
            total = mpc(0)
            for p in partials:
                total += p
        lost = lost_bits(size, total)
        if lost + 16 <= guard or guard > 4 * ctx.bits:
            with gmpy2.context(precision=ctx.bits):
                return mpc(total)
        guard = lost + 32


def interp_sequence(k, s: mpc, N: int, prec: int) -> np.ndarray:
    """Truncated I_k(s) for every cutoff: ``seq[M]`` sums the tuples with ``n_r <= M``.

    For each pivot value n the upper chains of all pivot positions are
    advanced together, ascending in the upper variables, with pivot i
    injecting its weight ``n**-(k_i+s) L_i(n)`` at level i.  The top level
    then holds the contribution of tuples whose largest entry is x.
    """
    r = len(k)
    X = integers(N, prec)[: N + 1]
    with gmpy2.context(precision=prec):
        tables = _chain_tables(k, N, prec)
        real = s.imag == 0
        zero = mpfr(0) if real else mpc(0)
        top = np.array([zero] * (N + 1), dtype=object)
        for n in range(1, N + 1):
            lower = _lower_sums(k, n, X, tables, prec)
            ps = _pivot_power(n, s, prec)
            weights = [mpfr(n) ** (-k[i]) * ps * lower[i] for i in range(r)]
            top[n] += weights[-1]
            if n == N or r == 1:
                continue
            recip = 1 / (X[n + 1:N + 1] - n)
            level = None
            for j in range(1, r):
                factor = tables[j][n + 1:N + 1] * recip
                carry = np.empty(N - n, dtype=object)
                carry[0] = weights[j - 1]
                if level is None:
                    carry[1:] = weights[j - 1]
                else:
                    carry[1:] = weights[j - 1] + np.cumsum(level[:-1])
                level = factor * carry
            top[n + 1:] += level
        seq = np.empty(N + 1, dtype=object)
        seq[0] = zero
        seq[1:] = np.cumsum(top[1:])
        return seq


def _families(s: mpc, depth: int):
    """Exponents and log-power count for the remainder of truncated I_k(s)."""
    P = interp_terms(depth)
    Q = depth - 1
    if is_real_integer(s):
        return [mpfr(p) for p in range(1, P + 1)], Q + 1
    return [mpfr(p) for p in range(1, P + 1)] + [p + s for p in range(1, P + 1)], Q


@lru_cache(maxsize=256)
def _interp_estimate(k: tuple, s: mpc, N: int, bits: int) -> Estimate:
    prec = bits + 2 * GUARD_BITS
    seq = interp_sequence(k, s, N, prec)
    exponents, Q = _families(s, len(k))
    ls_prec = 2 * prec + 64
    estimates = []
    for hi in (N, N // 2):
        fam = exponents
        while fam and 1 + len(fam) * (Q + 1) > extrapolate.max_unknowns(hi):
            fam = _trim(fam)
        if not fam:
            estimates.append(seq[hi])
        else:
            estimates.append(extrapolate.fit_power_logs(seq, fam, Q, hi, ls_prec))
    return Estimate(estimates[0], estimates[1], None, N)


def _trim(fam):
    """Drop the fastest-decaying exponent(s) from a family list."""
    if len(fam) <= 1:
        return []
    half = len(fam) // 2
    if len(fam) % 2 == 0 and all(isinstance(a, mpfr) for a in fam[:half]) and not all(
            isinstance(a, mpfr) for a in fam):
        return fam[:half - 1] + fam[half:-1]
    return fam[:-1]


def interp_eval(k, s, ctx: PrecisionContext = PrecisionContext()) -> Evaluation:
    """I_k(s) for Re(s) > -1 + delta, extrapolated from the truncated sums.

    ``cancellation_ratio`` is the largest pivot partial over the result at
    the final truncation, exposing cancellation between the alternating
    pivot signs.
    """
    k = require_admissible(k)
    s = _check_s(s, ctx)
    bits = ctx.bits

    def at(N):
        N = _check_cutoff(N, len(k))
        est = _interp_estimate(k, s, N, bits)
        partials, _ = _pivot_partials(k, s, N, bits + GUARD_BITS)
        with gmpy2.context(precision=bits + GUARD_BITS):
            biggest = max(abs(p) for p in partials)
        return evaluation_from(est, bits, size=biggest)

    return adaptive(at, ctx, INTERP_CAP)


# -- m-coordinate oracle ---------------------------------------------------

def interp_mform(k, s, N: int, ctx: PrecisionContext = PrecisionContext()) -> mpc:
    """Brute-force truncated I_k(s) in the coordinates ``n_i = m_1 + ... + m_i``.

    Sums, over ``m_1, ..., m_r >= 1`` with ``m_1 + ... + m_r <= N``,

        (-1)**(i-1) prod_j (m_1+...+m_j)**-(k_j-1) * (m_1+...+m_i)**-(s+1)
        * prod_{j<i} 1/(m_{j+1}+...+m_i) * prod_{j>i} 1/(m_{i+1}+...+m_j).

    Cost grows like N**r, so depth is limited to 3 and N to 200.
    """
    k = require_admissible(k)
    s = _check_s(s, ctx)
    r = len(k)
    if r > MFORM_MAX_DEPTH:
        raise CapabilityError(f"m-form oracle supports depth <= {MFORM_MAX_DEPTH}, got {r}")
    N = _check_cutoff(N, r)
    if N > MFORM_MAX_TERMS:
        raise CapabilityError(f"m-form oracle supports N <= {MFORM_MAX_TERMS}, got {N}")
    prec = ctx.bits + 2 * GUARD_BITS
    with gmpy2.context(precision=prec):
        recip = [mpfr(0)] + [1 / mpfr(t) for t in range(1, N + 1)]
        rising = {kj: [mpfr(0)] + [mpfr(t) ** (1 - kj) for t in range(1, N + 1)] for kj in set(k)}
        logs = log_table(N, prec)
        shift = s + 1
        if shift.imag == 0:
            pivot = [mpfr(0)] + [gmpy2.exp(-shift.real * logs[t]) for t in range(1, N + 1)]
            total = mpfr(0)
        else:
            pivot = [mpc(0)] + [gmpy2.exp(-shift * logs[t]) for t in range(1, N + 1)]
            total = mpc(0)
        for ms in _m_tuples(r, N):
            t = [0] * r
            acc = 0
            for j, mj in enumerate(ms):
                acc += mj
                t[j] = acc
            base = mpfr(1)
            for j in range(r):
                base *= rising[k[j]][t[j]]
            for i in range(r):
                term = base * pivot[t[i]]
                for j in range(i):
                    term *= recip[sum(ms[j + 1:i + 1])]
                for j in range(i + 1, r):
                    term *= recip[sum(ms[i + 1:j + 1])]
                if i % 2:
                    total -= term
                else:
                    total += term
    with gmpy2.context(precision=ctx.bits):
        return mpc(total)


def _m_tuples(r: int, budget: int, prefix=()):
    if r == 0:
        yield prefix
        return
    for m in range(1, budget - (r - 1) + 1):
        yield from _m_tuples(r - 1, budget - m, prefix + (m,))
