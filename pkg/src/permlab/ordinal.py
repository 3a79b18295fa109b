"""Ordinal patterns of real-valued sequences.

The ordinal (permutation) pattern of a length-n window is the sequence of
ranks of its entries: entry i receives rank a_i, with a_i < a_j exactly when
x_i < x_j.  Equal values are ranked in order of appearance, so the pattern is
always a genuine permutation of {1..n}.  Patterns are identified with their
1-based position in the lexicographic enumeration of all n! permutations,
computed via the factorial number system (Lehmer code).

Index conventions: ``delayed_subsequence`` takes a 1-based start index,
matching the usual mathematical statement of the delayed-embedding map;
``pattern_ranks`` returns one rank per 0-based array offset.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Sequence

import numpy as np

from .errors import DomainError, SignalTooShortError

# Lehmer-code arithmetic is kept within exact 64-bit range; analysis grids
# in this package never exceed dimension 7.
MAX_DIM = 12


@dataclass(frozen=True)
class OrdinalPattern:
    """A permutation of {1..n} giving the relative order of a window."""

    symbols: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.symbols)
        if n == 0:
            raise DomainError("ordinal pattern must not be empty")
        if sorted(self.symbols) != list(range(1, n + 1)):
            raise DomainError(
                f"symbols {self.symbols} are not a permutation of 1..{n}"
            )

    @property
    def n(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]


def pattern(x: Sequence[float] | np.ndarray) -> OrdinalPattern:
    """Ordinal pattern of ``x``: the rank of each entry, ties by appearance.

    Examples
    --------
    >>> pattern([1.2, 3.1, -4.9]).symbols
    (2, 3, 1)
    >>> pattern([5, 5, 1]).symbols      # first 5 outranks nothing yet
    (2, 3, 1)
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise DomainError(f"expected a 1-d sequence, got shape {arr.shape}")
    if arr.size == 0:
        raise DomainError("cannot take the pattern of an empty sequence")
    if not np.all(np.isfinite(arr)):
        raise DomainError("sequence contains NaN or infinite entries")
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(arr.size, dtype=np.int64)
    ranks[order] = np.arange(1, arr.size + 1)
    return OrdinalPattern(tuple(int(r) for r in ranks))


def _symbols(p: OrdinalPattern | Sequence[int]) -> tuple[int, ...]:
    if isinstance(p, OrdinalPattern):
        return p.symbols
    symbols = tuple(int(s) for s in p)
    n = len(symbols)
    if sorted(symbols) != list(range(1, n + 1)):
        raise DomainError(f"symbols {symbols} are not a permutation of 1..{n}")
    return symbols


def lex_rank(p: OrdinalPattern | Sequence[int]) -> int:
    """1-based position of ``p`` in lexicographic order of its n! peers.

    Uses the Lehmer code: each symbol contributes (number of smaller symbols
    to its right) * (remaining positions)!.

    >>> lex_rank((2, 3, 1))
    4
    """
    symbols = _symbols(p)
    n = len(symbols)
    if n > MAX_DIM:
        raise DomainError(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    rank = 0
    for i, a in enumerate(symbols):
        smaller_right = sum(1 for b in symbols[i + 1:] if b < a)
        rank += smaller_right * factorial(n - 1 - i)
    return rank + 1


def lex_unrank(rank: int, dim: int) -> OrdinalPattern:
    """Inverse of :func:`lex_rank`: the ``rank``-th permutation of {1..dim}.

    >>> lex_unrank(4, 3).symbols
    (2, 3, 1)
    """
    if dim < 1:
        raise DomainError(f"dimension must be >= 1, got {dim}")
    if dim > MAX_DIM:
        raise DomainError(f"dimension {dim} exceeds the supported maximum {MAX_DIM}")
    if not 1 <= rank <= factorial(dim):
        raise DomainError(
            f"rank {rank} outside 1..{factorial(dim)} for dimension {dim}"
        )
    remaining = list(range(1, dim + 1))
    code = rank - 1
    symbols = []
    for i in range(dim):
        f = factorial(dim - 1 - i)
        digit, code = divmod(code, f)
        symbols.append(remaining.pop(digit))
    return OrdinalPattern(tuple(symbols))


def delayed_subsequence(
    x: Sequence[float] | np.ndarray, start: int, dim: int, delay: int
) -> np.ndarray:
    """The window (x_start, x_{start+delay}, ..., x_{start+(dim-1)*delay}).

    ``start`` is 1-based: ``start=1`` selects the first sample.

    >>> delayed_subsequence([10, 20, 30, 40, 50], start=1, dim=3, delay=2)
    array([10., 30., 50.])
    """
    arr = np.asarray(x, dtype=float)
    if dim < 1 or delay < 1:
        raise DomainError(f"dim and delay must be >= 1, got dim={dim}, delay={delay}")
    t = arr.size
    last = start + (dim - 1) * delay
    if start < 1 or last > t:
        raise SignalTooShortError(
            f"signal too short: start={start} with dim={dim}, delay={delay} "
            f"needs indices up to {last} but length is {t}",
            min_length=last,
        )
    return arr[start - 1 : start - 1 + dim * delay : delay].copy()


def pattern_ranks(x: Sequence[float] | np.ndarray, dim: int, delay: int) -> np.ndarray:
    """Lexicographic ranks of every delayed window of ``x``, in start order.

    Entry k (0-based) is ``lex_rank(pattern(delayed_subsequence(x, k+1,
    dim, delay)))``; the result has length t - (dim-1)*delay.  Vectorized:
    a stable argsort ranks each window, and the Lehmer code is evaluated
    from pairwise comparisons.
    """
    arr = np.asarray(x, dtype=float)
    if dim < 1 or delay < 1:
        raise DomainError(f"dim and delay must be >= 1, got dim={dim}, delay={delay}")
    if dim > MAX_DIM:
        raise DomainError(f"dimension {dim} exceeds the supported maximum {MAX_DIM}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("sequence contains NaN or infinite entries")
    t = arr.size
    min_len = (dim - 1) * delay + 1
    if t < min_len:
        raise SignalTooShortError(
            f"signal too short: length {t} < {min_len} required for "
            f"(dim={dim}, delay={delay})",
            min_length=min_len,
        )
    count = t - (dim - 1) * delay
    if dim == 1:
        return np.ones(count, dtype=np.int64)
    windows = arr[np.arange(count)[:, None] + delay * np.arange(dim)[None, :]]
    order = np.argsort(windows, axis=1, kind="stable")
    ranks = np.empty_like(order)
    np.put_along_axis(
        ranks, order, np.broadcast_to(np.arange(1, dim + 1), (count, dim)), axis=1
    )
    # Lehmer digit i = number of smaller symbols to the right of position i.
    smaller = ranks[:, :, None] > ranks[:, None, :]  # [w, i, j]: a_j < a_i
    right_of = np.triu(np.ones((dim, dim), dtype=bool), k=1)  # j > i
    digits = np.sum(smaller & right_of[None, :, :], axis=2)
    weights = np.array([factorial(dim - 1 - i) for i in range(dim)], dtype=np.int64)
    codes = digits @ weights
    return codes + 1
