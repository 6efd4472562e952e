"""Precision configuration, evaluation records and shared numeric helpers.

All arithmetic runs on MPFR/MPC numbers from :mod:`gmpy2`.  gmpy2 contexts
are thread-local, so every routine opens its own ``gmpy2.context`` and
never mutates the caller's.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from numbers import Number

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .errors import InvalidInputError

DEFAULT_BITS = 128
DEFAULT_EPS = 1e-15
DEFAULT_DELTA = 0.05
SAFETY_FACTOR = 10

# Extra working bits carried through every truncated sum before rounding.
GUARD_BITS = 32


@dataclass(frozen=True)
class PrecisionContext:
    """Immutable arithmetic/truncation settings.

    ``terms`` (fixed truncation) and ``eps`` (adaptive target) are mutually
    exclusive; with neither given, evaluation is adaptive with
    ``DEFAULT_EPS``.  ``max_terms`` overrides the per-routine truncation cap.
    """

    bits: int = DEFAULT_BITS
    terms: int | None = None
    eps: float | None = None
    max_terms: int | None = None
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < 64:
            raise InvalidInputError(f"mantissa bits must be an integer >= 64, got {self.bits!r}")
        if self.terms is not None and self.eps is not None:
            raise InvalidInputError("give either a fixed truncation or a target epsilon, not both")
        if self.terms is not None and (int(self.terms) != self.terms or self.terms < 1):
            raise InvalidInputError(f"truncation must be a positive integer, got {self.terms!r}")
        if self.eps is not None and not (self.eps > 0):
            raise InvalidInputError(f"target epsilon must be positive, got {self.eps!r}")
        if self.max_terms is not None and (int(self.max_terms) != self.max_terms or self.max_terms < 1):
            raise InvalidInputError(f"truncation cap must be a positive integer, got {self.max_terms!r}")
        if not (self.delta > 0):
            raise InvalidInputError("domain margin delta must be positive")

    @property
    def adaptive(self) -> bool:
        return self.terms is None

    @property
    def target(self) -> float:
        return DEFAULT_EPS if self.eps is None else float(self.eps)

    @property
    def rounding_budget(self) -> mpfr:
        """Relative tolerance for identities that hold exactly at finite N."""
        with gmpy2.context(precision=self.bits):
            return mpfr(2) ** (16 - self.bits)


@dataclass(frozen=True)
class Evaluation:
    """A computed value with its heuristic truncation-error estimate.

    ``cancellation_ratio`` is the largest partial magnitude over the
    magnitude of the result, clamped below at 1.  The error estimate is a
    heuristic (``heuristic=True``), never a proven bound.
    """

    value: mpc
    error_estimate: mpfr
    terms_used: int
    cancellation_ratio: mpfr
    heuristic: bool = field(default=True)

    def __post_init__(self):
        if self.error_estimate < 0 or self.terms_used < 1:
            raise ValueError("invalid evaluation record")
        if not gmpy2.is_finite(self.value.real) or not gmpy2.is_finite(self.value.imag):
            raise ArithmeticError("non-finite value escaped an evaluation")


def to_mpfr(x, prec: int) -> mpfr:
    """Convert an int, Fraction, float, Decimal, string or mpfr to ``prec`` bits."""
    with gmpy2.context(precision=prec):
        if isinstance(x, Fraction):
            return mpfr(gmpy2.mpq(x.numerator, x.denominator))
        if isinstance(x, Decimal):
            return mpfr(str(x))
        if isinstance(x, str):
            text = x.strip()
            try:
                if "/" in text:
                    return mpfr(gmpy2.mpq(Fraction(text).numerator, Fraction(text).denominator))
                Decimal(text)
                return mpfr(text)
            except (ValueError, InvalidOperation, ZeroDivisionError):
                raise InvalidInputError(f"cannot parse real number {x!r}") from None
        if isinstance(x, (complex, mpc)):
            raise InvalidInputError(f"expected a real number, got {x!r}")
        if isinstance(x, (int, float, type(mpfr(0)), gmpy2.mpq)) or isinstance(x, Number):
            return mpfr(x)
    raise InvalidInputError(f"cannot convert {x!r} to a real number")


def to_mpc(x, prec: int) -> mpc:
    """Convert a number, ``(re, im)`` pair or ``"RE[,IM]"`` string to ``mpc``."""
    if isinstance(x, str):
        fields = [f.strip() for f in x.split(",")]
        if len(fields) == 1:
            return to_mpc((fields[0], "0"), prec)
        if len(fields) == 2:
            return to_mpc((fields[0], fields[1]), prec)
        raise InvalidInputError(f"cannot parse complex number {x!r}; expected RE or RE,IM")
    if isinstance(x, tuple):
        if len(x) != 2:
            raise InvalidInputError(f"complex pair must have two entries, got {x!r}")
        re, im = to_mpfr(x[0], prec), to_mpfr(x[1], prec)
        with gmpy2.context(precision=prec):
            return mpc(re, im)
    with gmpy2.context(precision=prec):
        if isinstance(x, mpc):
            return mpc(x)
        if isinstance(x, complex):
            return mpc(x)
    return to_mpc((x, 0), prec)


def is_real_integer(z: mpc) -> bool:
    return z.imag == 0 and gmpy2.is_integer(z.real)


def finite_or_raise(z, what: str):
    if isinstance(z, mpc):
        ok = gmpy2.is_finite(z.real) and gmpy2.is_finite(z.imag)
    else:
        ok = gmpy2.is_finite(z)
    if not ok:
        raise ArithmeticError(f"non-finite result in {what}")
    return z


def lost_bits(abs_sum, value) -> int:
    """Bits lost to cancellation when ``value`` is a sum of terms of total size ``abs_sum``."""
    mag = abs(value)
    if abs_sum == 0:
        return 0
    if mag == 0:
        return 10**6
    return max(0, math.ceil(float(gmpy2.log2(abs_sum / mag))))


def clamp_ratio(partial_max, value, prec: int) -> mpfr:
    with gmpy2.context(precision=prec):
        mag = abs(value)
        if mag == 0:
            return mpfr(1)
        return max(mpfr(1), mpfr(partial_max) / mag)


def round_to(z, bits: int):
    with gmpy2.context(precision=bits):
        return mpc(z) if isinstance(z, mpc) else mpfr(z)


# -- cached tables ---------------------------------------------------------

_lock = threading.Lock()
_log_cache: dict[int, np.ndarray] = {}
_pow_cache: dict[tuple[int, int], np.ndarray] = {}
_int_cache: dict[int, np.ndarray] = {}


def _grow(cache, key, n, build):
    with _lock:
        arr = cache.get(key)
    if arr is None or len(arr) <= n:
        size = max(n + 1, 2 * len(arr) if arr is not None else 0)
        arr = build(size)
        arr.flags.writeable = False
        with _lock:
            cache[key] = arr
    return arr


def integers(n: int, prec: int) -> np.ndarray:
    """Object array ``[mpfr(0), mpfr(1), ..., mpfr(n)]`` (possibly longer)."""
    def build(size):
        with gmpy2.context(precision=prec):
            return np.array([mpfr(i) for i in range(size)], dtype=object)
    return _grow(_int_cache, prec, n, build)


def log_table(n: int, prec: int) -> np.ndarray:
    """``ln j`` for ``j = 0..n``; entry 0 is a placeholder zero.  Cached per precision."""
    def build(size):
        with gmpy2.context(precision=prec):
            return np.array([mpfr(0)] + [gmpy2.log(mpfr(j)) for j in range(1, size)], dtype=object)
    return _grow(_log_cache, prec, n, build)


def power_table(n: int, e: int, prec: int) -> np.ndarray:
    """``j**e`` for integer ``e`` and ``j = 0..n`` (entry 0 is zero)."""
    def build(size):
        with gmpy2.context(precision=prec):
            return np.array([mpfr(0)] + [mpfr(j) ** e for j in range(1, size)], dtype=object)
    return _grow(_pow_cache, (e, prec), n, build)


def complex_power_table(n: int, s: mpc, prec: int) -> np.ndarray:
    """``j**(-s) = exp(-s ln j)`` for ``j = 0..n`` using the shared log table."""
    logs = log_table(n, prec)
    with gmpy2.context(precision=prec):
        s = mpc(s)
        if s.imag == 0:
            neg = -s.real
            return np.array([mpfr(0)] + [gmpy2.exp(neg * logs[j]) for j in range(1, n + 1)], dtype=object)
        neg = -s
        return np.array([mpc(0)] + [gmpy2.exp(neg * logs[j]) for j in range(1, n + 1)], dtype=object)
