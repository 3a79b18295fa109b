"""Fixed-length feature vectors for modulation classification.

Three feature kinds:

* ``mspe`` - the signal is viewed through 7 windows (the full signal, its
  two halves, and its four quarters); each window yields an entropy grid
  over the default 5 x 8 (dimension, delay) grid, flattened row-major
  (dimension-major), and the windows are concatenated in order full,
  half 1, half 2, quarter 1..4.  Default grid and a length-2048 signal
  give 7 * 40 = 280 values.  Cells hold entropy in bits unless
  ``normalized`` is set.
* ``raw`` - the samples themselves.
* ``spectrogram`` - one-sided magnitude spectra (bins 0..L/2) of
  non-overlapping rectangular windows in three resolutions: 8 windows of
  256 samples, 16 of 128, 32 of 64; flattened window-major and
  concatenated, 3128 values for a length-2048 signal.  No taper and no
  log compression.

Ordinal-pattern features are invariant under positive affine amplitude
transforms of the input; raw and spectrogram features are not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial, log2
from typing import Mapping, Sequence

import json

import numpy as np

from .entropy import _validate_grid
from .errors import ConfigurationError, DomainError, SignalTooShortError
from .ordinal import pattern_ranks
from .synth import LabeledSignal

DEFAULT_DIMS = (3, 4, 5, 6, 7)
DEFAULT_DELAYS = (1, 5, 10, 15, 20, 30, 40, 50)

# (window count, window length) per spectrogram resolution; lengths must
# tile the expected signal exactly.
SPECTROGRAM_WINDOWS = ((8, 256), (16, 128), (32, 64))
SPECTROGRAM_INPUT_LENGTH = 2048
SPECTROGRAM_LENGTH = sum(c * (l // 2 + 1) for c, l in SPECTROGRAM_WINDOWS)

FEATURE_KINDS = ("mspe", "raw", "spectrogram")


@dataclass(frozen=True)
class FeatureVector:
    """Extracted features plus the parameters they were computed with."""

    kind: str
    values: np.ndarray
    provenance: Mapping[str, object] = field(default_factory=dict)


def _window_bounds(t: int) -> list[tuple[int, int]]:
    """(start, length) of the full signal, its halves, and its quarters."""
    half, quarter = t // 2, t // 4
    return [
        (0, t),
        (0, half),
        (half, half),
        (0, quarter),
        (quarter, quarter),
        (2 * quarter, quarter),
        (3 * quarter, quarter),
    ]


def mspe_features(
    x: Sequence[float] | np.ndarray,
    dims: Sequence[int] = DEFAULT_DIMS,
    delays: Sequence[int] = DEFAULT_DELAYS,
    normalized: bool = False,
) -> FeatureVector:
    """Concatenated per-window entropy grids of ``x``.

    Pattern ranks are computed once per (dim, delay) over the whole signal;
    a window's pattern counts are then a contiguous slice of that rank
    sequence, which is identical to recomputing on the window alone.
    """
    arr = np.asarray(x, dtype=float)
    dims, delays = _validate_grid(dims, delays)
    if normalized and dims[0] < 2:
        raise DomainError("normalized grid requires every dim >= 2")
    if arr.size % 4:
        raise DomainError(
            f"signal length {arr.size} must be divisible by 4 for quarter windows"
        )
    quarter = arr.size // 4
    min_quarter = (max(dims) - 1) * max(delays) + 1
    if quarter < min_quarter:
        raise SignalTooShortError(
            f"quarter windows of {quarter} samples cannot host "
            f"(dim={max(dims)}, delay={max(delays)}); signal must be at least "
            f"{4 * min_quarter} samples",
            min_length=4 * min_quarter,
        )
    bounds = _window_bounds(arr.size)
    values = np.empty((len(bounds), len(dims), len(delays)), dtype=float)
    for i, n in enumerate(dims):
        denom = log2(factorial(n)) if normalized else 1.0
        for j, d in enumerate(delays):
            ranks = pattern_ranks(arr, n, d)
            span = (n - 1) * d
            for w, (start, length) in enumerate(bounds):
                counts = np.bincount(
                    ranks[start : start + length - span] - 1, minlength=factorial(n)
                )
                c = counts[counts > 0]
                p = c / (length - span)
                values[w, i, j] = float(-(p * np.log2(p)).sum()) / denom
    return FeatureVector(
        kind="mspe",
        values=values.reshape(-1),
        provenance={"dims": dims, "delays": delays, "normalized": normalized},
    )


def raw_features(x: Sequence[float] | np.ndarray) -> FeatureVector:
    """The samples themselves, copied."""
    return FeatureVector(kind="raw", values=np.asarray(x, dtype=float).copy())


def spectrogram_features(x: Sequence[float] | np.ndarray) -> FeatureVector:
    """Concatenated one-sided magnitude spectra at three window resolutions."""
    arr = np.asarray(x, dtype=float)
    if arr.size != SPECTROGRAM_INPUT_LENGTH:
        raise DomainError(
            f"spectrogram features require length {SPECTROGRAM_INPUT_LENGTH}, "
            f"got {arr.size}"
        )
    parts = []
    for count, length in SPECTROGRAM_WINDOWS:
        windows = arr.reshape(count, length)
        parts.append(np.abs(np.fft.rfft(windows, axis=1)).reshape(-1))
    return FeatureVector(
        kind="spectrogram",
        values=np.concatenate(parts),
        provenance={"windows": SPECTROGRAM_WINDOWS},
    )


def extract_features(
    signals: Sequence[LabeledSignal],
    kind: str,
    dims: Sequence[int] = DEFAULT_DIMS,
    delays: Sequence[int] = DEFAULT_DELAYS,
    normalized: bool = False,
) -> list[FeatureVector]:
    """Features of every signal, in input order."""
    if kind not in FEATURE_KINDS:
        raise ConfigurationError(
            f"unknown feature kind {kind!r}; expected one of {FEATURE_KINDS}"
        )
    out = []
    for sig in signals:
        if kind == "mspe":
            fv = mspe_features(sig.samples, dims, delays, normalized)
        elif kind == "raw":
            fv = raw_features(sig.samples)
        else:
            fv = spectrogram_features(sig.samples)
        out.append(
            FeatureVector(
                kind=fv.kind,
                values=fv.values,
                provenance={**fv.provenance, "label": sig.label, "seed": sig.seed},
            )
        )
    return out


def features_csv_text(
    labels: Sequence[str], vectors: Sequence[FeatureVector]
) -> str:
    """CSV export: header ``label,f_0..f_{d-1}``, one row per signal."""
    if len(labels) != len(vectors):
        raise DomainError("labels and vectors must have equal length")
    width = vectors[0].values.size if vectors else 0
    lines = ["label," + ",".join(f"f_{i}" for i in range(width))]
    for label, fv in zip(labels, vectors):
        if fv.values.size != width:
            raise DomainError("feature vectors must share one dimension")
        lines.append(label + "," + ",".join(repr(float(v)) for v in fv.values))
    return "\n".join(lines) + "\n"


def features_json_doc(
    labels: Sequence[str],
    vectors: Sequence[FeatureVector],
    params: Mapping[str, object],
) -> dict:
    """JSON-ready export with a parameter block describing the extraction."""
    if len(labels) != len(vectors):
        raise DomainError("labels and vectors must have equal length")
    return {
        "spec_version": 1,
        "params": dict(params),
        "labels": list(labels),
        "features": [[float(v) for v in fv.values] for fv in vectors],
    }


def write_features_csv(
    path: str, labels: Sequence[str], vectors: Sequence[FeatureVector]
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(features_csv_text(labels, vectors))


def write_features_json(
    path: str,
    labels: Sequence[str],
    vectors: Sequence[FeatureVector],
    params: Mapping[str, object],
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(features_json_doc(labels, vectors, params), fh)
        fh.write("\n")
