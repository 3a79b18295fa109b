"""Overlapping fixed-length windows and per-window entropy profiles.

Window starts follow the recursion s_1 = 1, s_{j+1} = s_j + step, where the
step rounds (1 - overlap) * length up to an integer.  Two rounding modes are
provided because the two natural readings of "round up" disagree exactly
when (1 - overlap) * length is already an integer:

* ``figure``: ordinary ceiling, so an exact integer is its own step.  For
  length 5 and overlap 0.4 the step is 3 and consecutive windows share two
  samples.
* ``strict-footnote``: smallest integer strictly greater, so an exact
  integer bumps to the next one (step 4 in the same configuration).

``figure`` is the default.  The step is clamped to >= 1 so overlap values
approaching 1 cannot stall the recursion.  Start indices are 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .entropy import distribution, normalized_pe
from .errors import DomainError, SignalTooShortError

CEILING_MODES = ("figure", "strict-footnote")

# Tolerance for deciding that (1 - overlap) * length is an integer despite
# binary rounding of the overlap proportion (0.6 * 5 evaluates to 2.999...96).
_INTEGER_EPS = 1e-9


@dataclass(frozen=True)
class WindowSpec:
    """Window length, overlap proportion in [0, 1), and rounding mode."""

    length: int
    overlap: float = 0.0
    ceiling_mode: str = "figure"

    def __post_init__(self) -> None:
        if self.length < 1:
            raise DomainError(f"window length must be >= 1, got {self.length}")
        if not 0.0 <= self.overlap < 1.0:
            raise DomainError(f"overlap must be in [0, 1), got {self.overlap}")
        if self.ceiling_mode not in CEILING_MODES:
            raise DomainError(
                f"ceiling_mode must be one of {CEILING_MODES}, got "
                f"{self.ceiling_mode!r}"
            )

    @property
    def step(self) -> int:
        """Gap between consecutive start indices, always >= 1."""
        raw = (1.0 - self.overlap) * self.length
        nearest = round(raw)
        if abs(raw - nearest) < _INTEGER_EPS:
            step = nearest + (1 if self.ceiling_mode == "strict-footnote" else 0)
        else:
            step = math.ceil(raw)
        return max(step, 1)


def window_starts(t: int, spec: WindowSpec) -> list[int]:
    """1-based start indices of every full window inside a length-t series.

    The last start s satisfies s + length - 1 <= t; trailing samples that
    cannot fill a window are dropped.
    """
    if t < 1:
        raise DomainError(f"series length must be >= 1, got {t}")
    if spec.length > t:
        raise DomainError(
            f"window of length {spec.length} exceeds series of length {t}"
        )
    last_start = t - spec.length + 1
    return list(range(1, last_start + 1, spec.step))


def pe_profile(
    x: Sequence[float] | np.ndarray,
    dim: int,
    delay: int,
    spec: WindowSpec,
) -> np.ndarray:
    """Normalized permutation entropy of each window of ``x``, in start order."""
    arr = np.asarray(x, dtype=float)
    min_len = (dim - 1) * delay + 1
    if spec.length < min_len:
        raise SignalTooShortError(
            f"window of length {spec.length} too short for (dim={dim}, "
            f"delay={delay}); needs at least {min_len} samples",
            min_length=min_len,
        )
    starts = window_starts(arr.size, spec)
    profile = np.empty(len(starts), dtype=float)
    for i, s in enumerate(starts):
        window = arr[s - 1 : s - 1 + spec.length]
        profile[i] = normalized_pe(distribution(window, dim, delay))
    return profile
