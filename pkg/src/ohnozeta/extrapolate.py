"""Limit estimation from a run of truncated partial sums.

A truncated nested sum ``S(N)`` differs from its limit by a remainder with
a known asymptotic shape.  Fitting ``S(N)`` over a window ``[N/4, N]``
by linear least squares against that shape recovers the limit as the
constant coefficient.  Two shapes are supported:

* head model: ``S(N) = L + sum_j H_j(N) * sum_p c_jp N**-(sigma_j + p)``
  where the ``H_j`` are exactly computed truncated prefix sums;
* power-log model: ``S(N) = L + sum_{a, q} c_aq N**-a (log N)**q`` over a
  given set of exponents ``a``.

The fits only ever see partial sums up to the window end, so comparing the
estimate from ``[N/8, N/2]`` with the one from ``[N/4, N]`` gives a
heuristic error estimate that is the analogue of comparing raw sums at N and
2N.
"""
from __future__ import annotations

import math

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

# Rows sampled per unknown in each fit.
OVERSAMPLE = 3


def sample_points(lo: int, hi: int, count: int) -> list[int]:
    """Roughly log-spaced distinct integers in ``[lo, hi]``, both ends included."""
    if hi - lo + 1 <= count:
        return list(range(lo, hi + 1))
    ratio = hi / lo
    pts = {lo, hi}
    for t in range(1, count - 1):
        pts.add(int(round(lo * ratio ** (t / (count - 1)))))
    return sorted(pts)


def window(hi: int) -> tuple[int, int]:
    return max(1, hi // 4), hi


def max_unknowns(hi: int) -> int:
    """Largest number of fit unknowns the window ending at ``hi`` supports."""
    lo, hi = window(hi)
    return (hi - lo + 1) // OVERSAMPLE


def _conj(x):
    return x.conjugate() if isinstance(x, mpc) else x


_conj_vec = np.frompyfunc(_conj, 1, 1)


def least_squares_constant(rows: np.ndarray, rhs: np.ndarray, prec: int):
    """Solve ``rows @ c ~= rhs`` in the least-squares sense; return ``c[0]``.

    Columns are equilibrated, then the normal equations are solved by
    Gaussian elimination with partial pivoting at ``prec`` bits.  Callers
    pass ``prec`` at roughly twice the data precision so the squared
    condition number of the normal equations stays harmless.
    """
    with gmpy2.context(precision=prec):
        n = rows.shape[1]
        scale = []
        for j in range(n):
            col_max = max(abs(v) for v in rows[:, j])
            scale.append(mpfr(1) / col_max if col_max != 0 else mpfr(1))
        scale = np.array(scale, dtype=object)
        A = rows * scale
        AH = _conj_vec(A).T
        G = AH.dot(A)
        y = AH.dot(rhs)
        for c in range(n):
            piv = max(range(c, n), key=lambda i: abs(G[i, c]))
            if G[piv, c] == 0:
                raise ArithmeticError("singular extrapolation basis")
            if piv != c:
                G[[c, piv]] = G[[piv, c]]
                y[[c, piv]] = y[[piv, c]]
            inv = 1 / G[c, c]
            for i in range(c + 1, n):
                f = G[i, c] * inv
                if f != 0:
                    G[i, c:] = G[i, c:] - f * G[c, c:]
                    y[i] = y[i] - f * y[c]
        x = [None] * n
        for i in reversed(range(n)):
            acc = y[i]
            for j in range(i + 1, n):
                acc = acc - G[i, j] * x[j]
            x[i] = acc / G[i, i]
        return x[0] * scale[0]


def _power(base, exponent):
    return gmpy2.exp(exponent * gmpy2.log(base))


def fit_heads(seq: np.ndarray, heads: list[np.ndarray], sigmas, terms: int, hi: int, prec: int):
    """Limit of ``seq`` under the head model, using data ``seq[N]`` for ``N <= hi``.

    ``heads[j][N]`` is the j-th exactly computed prefix sum and
    ``sigmas[j]`` the leading decay exponent of the matching tail.
    """
    lo, hi = window(hi)
    cols = 1 + len(heads) * terms
    pts = sample_points(lo, hi, OVERSAMPLE * cols)
    with gmpy2.context(precision=prec):
        rows = np.empty((len(pts), cols), dtype=object)
        rhs = np.empty(len(pts), dtype=object)
        for t, N in enumerate(pts):
            lx = gmpy2.log(mpfr(lo) / N)
            rows[t, 0] = mpfr(1)
            c = 1
            for head, sigma in zip(heads, sigmas):
                base = _exp_scalar(sigma * lx)
                step = gmpy2.exp(lx)
                h = head[N]
                for _ in range(terms):
                    rows[t, c] = h * base
                    base = base * step
                    c += 1
            rhs[t] = seq[N]
        return least_squares_constant(rows, rhs, prec)


def fit_power_logs(seq: np.ndarray, exponents, log_powers: int, hi: int, prec: int):
    """Limit of ``seq`` under the power-log model with the given exponents."""
    lo, hi = window(hi)
    cols = 1 + len(exponents) * (log_powers + 1)
    pts = sample_points(lo, hi, OVERSAMPLE * cols)
    with gmpy2.context(precision=prec):
        rows = np.empty((len(pts), cols), dtype=object)
        rhs = np.empty(len(pts), dtype=object)
        for t, N in enumerate(pts):
            lx = gmpy2.log(mpfr(lo) / N)
            rows[t, 0] = mpfr(1)
            c = 1
            for a in exponents:
                base = _exp_scalar(a * lx)
                for q in range(log_powers + 1):
                    rows[t, c] = base * (-lx) ** q
                    c += 1
            rhs[t] = seq[N]
        return least_squares_constant(rows, rhs, prec)


def _exp_scalar(z):
    if isinstance(z, mpc) and z.imag == 0:
        z = z.real
    return gmpy2.exp(z)


def terms_for_budget(groups: int, hi: int, preferred: int) -> int:
    """Shrink the per-group term count until the fit is overdetermined enough."""
    limit = (max_unknowns(hi) - 1) // max(groups, 1)
    return max(0, min(preferred, limit))


def log2_or_inf(x) -> float:
    return math.inf if x == 0 else float(gmpy2.log2(abs(x)))
