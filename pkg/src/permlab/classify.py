"""Desk-scale classification harness: split, fit, evaluate, sweep.

Items are (label, feature_vector) pairs.  Two classifiers are provided:
nearest centroid (predict the class whose training mean is closest in
Euclidean distance) and k-nearest-neighbors (majority vote over the k
closest training items; vote ties go to the smallest class index, distance
ties to the smaller training index).  Classes are indexed in sorted label
order.  Every function is deterministic given its seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DomainError
from .features import DEFAULT_DELAYS, DEFAULT_DIMS, extract_features
from .synth import make_dataset

Item = tuple[str, np.ndarray]

CLASSIFIER_METHODS = ("centroid", "knn")

# Feature kinds whose coordinates are not commensurate and benefit from
# per-feature standardization; entropy grids are already on one scale.
STANDARDIZE_BY_DEFAULT = ("raw", "spectrogram")


@dataclass(frozen=True)
class Standardizer:
    """Per-feature affine map fitted on training data.

    Features with zero variance keep scale 1 so constant columns pass
    through unchanged.
    """

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, matrix: np.ndarray) -> "Standardizer":
        mean = matrix.mean(axis=0)
        std = matrix.std(axis=0)
        std = np.where(std == 0.0, 1.0, std)
        return cls(mean=mean, std=std)

    def transform(self, matrix: np.ndarray) -> np.ndarray:
        return (matrix - self.mean) / self.std


@dataclass(frozen=True)
class ConfusionMatrix:
    """Class-by-class counts: rows are true labels, columns predictions."""

    labels: tuple[str, ...]
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts) / self.counts.sum())

    def to_csv_text(self) -> str:
        lines = ["label," + ",".join(self.labels)]
        for label, row in zip(self.labels, self.counts):
            lines.append(label + "," + ",".join(str(int(c)) for c in row))
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "counts": [[int(c) for c in row] for row in self.counts],
            "accuracy": self.accuracy,
        }


@dataclass(frozen=True)
class SweepRow:
    """One accuracy measurement of an SNR sweep."""

    snr_db: float
    kind: str
    accuracy: float
    seed: int


def split(
    items: Sequence[Item], test_fraction: float, seed: int
) -> tuple[list[Item], list[Item]]:
    """Stratified train/test partition, deterministic per seed.

    Each class contributes floor(test_fraction * class_size) test items,
    drawn by seeded permutation; classes need at least 2 items.  Train and
    test preserve the original dataset order.
    """
    if not 0.0 < test_fraction < 1.0:
        raise DomainError(f"test_fraction must be in (0, 1), got {test_fraction}")
    by_class: dict[str, list[int]] = {}
    for idx, (label, _) in enumerate(items):
        by_class.setdefault(label, []).append(idx)
    for label, indices in by_class.items():
        if len(indices) < 2:
            raise DomainError(
                f"class {label!r} has {len(indices)} item(s); at least 2 required"
            )
    rng = np.random.default_rng(seed)
    test_idx: set[int] = set()
    for label in sorted(by_class):
        indices = by_class[label]
        n_test = int(test_fraction * len(indices))
        chosen = rng.permutation(len(indices))[:n_test]
        test_idx.update(indices[c] for c in chosen)
    train = [items[i] for i in range(len(items)) if i not in test_idx]
    test = [items[i] for i in range(len(items)) if i in test_idx]
    return train, test


def _as_matrix(items: Sequence[Item]) -> tuple[list[str], np.ndarray]:
    labels = [label for label, _ in items]
    widths = {np.asarray(v).size for _, v in items}
    if len(widths) > 1:
        raise DomainError(f"feature dimensions differ across items: {sorted(widths)}")
    matrix = np.stack([np.asarray(v, dtype=float).reshape(-1) for _, v in items])
    return labels, matrix


def fit_predict(
    train: Sequence[Item],
    test: Sequence[Item],
    method: str = "centroid",
    k: int = 5,
    standardize: bool = False,
) -> ConfusionMatrix:
    """Train on ``train``, predict ``test``, and tabulate the confusion matrix.

    Standardization parameters, when enabled, are fitted on the training
    items only.
    """
    if method not in CLASSIFIER_METHODS:
        raise ConfigurationError(
            f"unknown method {method!r}; expected one of {CLASSIFIER_METHODS}"
        )
    if not train or not test:
        raise DomainError("train and test must both be non-empty")
    train_labels, X_train = _as_matrix(train)
    test_labels, X_test = _as_matrix(test)
    if X_train.shape[1] != X_test.shape[1]:
        raise DomainError(
            f"train features have {X_train.shape[1]} dimensions, "
            f"test has {X_test.shape[1]}"
        )
    classes = sorted(set(train_labels))
    unknown = set(test_labels) - set(classes)
    if unknown:
        raise DomainError(f"test labels {sorted(unknown)} never appear in training")
    class_index = {c: i for i, c in enumerate(classes)}
    y_train = np.array([class_index[c] for c in train_labels])
    y_test = np.array([class_index[c] for c in test_labels])

    if standardize:
        scaler = Standardizer.fit(X_train)
        X_train = scaler.transform(X_train)
        X_test = scaler.transform(X_test)

    if method == "centroid":
        centroids = np.stack(
            [X_train[y_train == i].mean(axis=0) for i in range(len(classes))]
        )
        d2 = ((X_test[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        predictions = np.argmin(d2, axis=1)
    else:
        if k < 1:
            raise DomainError(f"k must be >= 1, got {k}")
        if k > len(train):
            raise DomainError(f"k={k} exceeds training set size {len(train)}")
        d2 = (
            (X_test**2).sum(axis=1)[:, None]
            - 2.0 * X_test @ X_train.T
            + (X_train**2).sum(axis=1)[None, :]
        )
        # Stable sort keeps the smaller training index on distance ties.
        nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
        votes = np.apply_along_axis(
            lambda row: np.bincount(y_train[row], minlength=len(classes)),
            1,
            nearest,
        )
        predictions = np.argmax(votes, axis=1)  # first max = smallest class index

    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    np.add.at(counts, (y_test, predictions), 1)
    return ConfusionMatrix(labels=tuple(classes), counts=counts)


def _derived_seed(*parts: int) -> int:
    return int(
        np.random.SeedSequence(list(parts)).generate_state(1, dtype=np.uint64)[0]
    )


def snr_sweep(
    schemes: Sequence[str],
    snrs: Sequence[float],
    per_class: int,
    feature_kinds: Sequence[str],
    method: str,
    seed: int,
    t: int = 2048,
    test_fraction: float = 0.3,
    k: int = 5,
    dims: Sequence[int] = DEFAULT_DIMS,
    delays: Sequence[int] = DEFAULT_DELAYS,
    standardize: bool | None = None,
) -> list[SweepRow]:
    """Accuracy of each feature kind at each SNR, freshly sampled per cell.

    Every (snr, kind) cell draws its own dataset and split with seeds
    derived from (seed, snr index, kind index), so the table is a pure
    function of the arguments.  ``standardize=None`` enables scaling for
    raw and spectrogram features only.
    """
    if not snrs:
        raise DomainError("snrs must be non-empty")
    if not feature_kinds:
        raise DomainError("feature_kinds must be non-empty")
    rows: list[SweepRow] = []
    for i, snr in enumerate(snrs):
        for j, kind in enumerate(feature_kinds):
            data_seed = _derived_seed(seed, i, j)
            split_seed = _derived_seed(seed, i, j, 1)
            signals = make_dataset(
                schemes, per_class=per_class, t=t, snr_db=float(snr), seed=data_seed
            )
            vectors = extract_features(signals, kind, dims=dims, delays=delays)
            items = [
                (sig.label, fv.values) for sig, fv in zip(signals, vectors)
            ]
            train, test = split(items, test_fraction, split_seed)
            scale = (
                kind in STANDARDIZE_BY_DEFAULT if standardize is None else standardize
            )
            cm = fit_predict(train, test, method=method, k=k, standardize=scale)
            rows.append(
                SweepRow(snr_db=float(snr), kind=kind, accuracy=cm.accuracy, seed=seed)
            )
    return rows
