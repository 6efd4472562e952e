"""Index combinatorics: admissibility, run-length form, duality, compositions.

Indices are plain tuples of positive integers ``(k_1, ..., k_r)``.  A run
form is a tuple of pairs ``(a, b)``; the pair expands to ``a - 1`` ones
followed by ``b + 1``.
"""
from __future__ import annotations

from itertools import product
from typing import Iterable, Iterator, Sequence

from .errors import DomainError, InvalidInputError

Index = tuple[int, ...]
RunForm = tuple[tuple[int, int], ...]


def as_index(k: Iterable[int]) -> Index:
    """Validate and freeze ``k`` as an index tuple."""
    if isinstance(k, str):
        return parse_index(k)
    try:
        parts = tuple(k)
    except TypeError:
        raise InvalidInputError(f"not an index: {k!r}") from None
    if not parts:
        raise InvalidInputError("empty index")
    for p in parts:
        if isinstance(p, bool) or int(p) != p or p < 1:
            raise InvalidInputError(f"index parts must be positive integers, got {p!r}")
    return tuple(int(p) for p in parts)


def parse_index(text: str) -> Index:
    """Parse ``"1,1,3"`` into ``(1, 1, 3)``."""
    fields = [f.strip() for f in text.strip().split(",")]
    if fields == [""]:
        raise InvalidInputError("empty index")
    try:
        parts = [int(f) for f in fields]
    except ValueError:
        raise InvalidInputError(f"cannot parse index {text!r}") from None
    return as_index(parts)


def format_index(k: Sequence[int]) -> str:
    return ",".join(str(p) for p in k)


def weight(k: Sequence[int]) -> int:
    return sum(as_index(k))


def depth(k: Sequence[int]) -> int:
    return len(as_index(k))


def is_admissible(k: Sequence[int]) -> bool:
    return as_index(k)[-1] >= 2


def require_admissible(k: Sequence[int]) -> Index:
    k = as_index(k)
    if k[-1] < 2:
        raise DomainError(f"index not admissible: ({format_index(k)}) has last part 1")
    return k


def to_runs(k: Sequence[int]) -> RunForm:
    """Run-length form of an admissible index.

    >>> to_runs((1, 1, 3))
    ((3, 2),)
    >>> to_runs((2, 3))
    ((1, 1), (1, 2))
    """
    k = require_admissible(k)
    runs = []
    ones = 0
    for p in k:
        if p == 1:
            ones += 1
        else:
            runs.append((ones + 1, p - 1))
            ones = 0
    return tuple(runs)


def from_runs(runs: Iterable[tuple[int, int]]) -> Index:
    """Expand a run form back into its index."""
    parts: list[int] = []
    for a, b in runs:
        if a < 1 or b < 1:
            raise InvalidInputError(f"run entries must be >= 1, got {(a, b)}")
        parts.extend([1] * (a - 1))
        parts.append(b + 1)
    return as_index(parts)


def dual(k: Sequence[int]) -> Index:
    """Dual index: reverse the runs and swap the roles of a and b.

    >>> dual((1, 2))
    (3,)
    >>> dual((2, 3))
    (1, 2, 2)
    """
    return from_runs((b, a) for a, b in reversed(to_runs(k)))


def compositions(r: int, m: int) -> Iterator[tuple[int, ...]]:
    """All ``(e_1, ..., e_r)`` with nonnegative entries summing to ``m``.

    Emitted in ascending colexicographic order (compare ``e_r`` first, then
    ``e_{r-1}``, ...), so ``compositions(2, 2)`` yields ``(2, 0), (1, 1),
    (0, 2)``.
    """
    if isinstance(r, bool) or int(r) != r or r < 1:
        raise InvalidInputError(f"composition length must be >= 1, got {r!r}")
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise InvalidInputError(f"composition total must be >= 0, got {m!r}")
    yield from _colex(int(r), int(m))


def _colex(r: int, m: int) -> Iterator[tuple[int, ...]]:
    if r == 1:
        yield (m,)
        return
    for last in range(m + 1):
        for head in _colex(r - 1, m - last):
            yield head + (last,)


def shifted(k: Sequence[int], e: Sequence[int]) -> Index:
    """``k + e`` componentwise."""
    if len(k) != len(e):
        raise InvalidInputError("composition length differs from index depth")
    return tuple(a + b for a, b in zip(k, e))


def admissible_indices(w: int) -> Iterator[Index]:
    """Every admissible index of weight ``w`` (there are ``2**(w-2)``).

    Uses the bijection with binary strings of length ``w - 2``: bit ``t``
    set means "cut after unit t+1" in a composition of ``w - 1``, whose last
    part is then raised by one.
    """
    if w < 2:
        return
    n = w - 1
    for bits in product((0, 1), repeat=n - 1):
        parts = []
        run = 1
        for cut in bits:
            if cut:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run + 1)
        yield tuple(parts)


def admissible_up_to(w_max: int, depth_max: int | None = None) -> Iterator[Index]:
    """Admissible indices by increasing weight, optionally depth-limited."""
    for w in range(2, w_max + 1):
        for k in admissible_indices(w):
            if depth_max is None or len(k) <= depth_max:
                yield k
