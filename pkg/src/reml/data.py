"""Dataset ingestion, label binarization, min-max normalization and synthetic data.

The on-disk format is plain CSV (optional header, configurable label column).
Rows whose feature values fail to parse as finite numbers are dropped and
counted; ragged rows are a hard error. Labels stay raw strings until
:func:`binarize_labels` maps them onto {0: benign, 1: attack}.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

# Default raw-label mapping: quiet and natural operational events count as
# benign, everything marked as an attack is malicious. Ships as a plain dict
# so deployments with differently labelled CSVs can supply their own file.
DEFAULT_LABEL_MAP = {
    "NoEvents": 0,
    "Natural": 0,
    "Attack": 1,
    "benign": 0,
    "attack": 1,
    "0": 0,
    "1": 1,
}


class DataError(ValueError):
    """Malformed or unusable input data."""


@dataclass
class Normalizer:
    """Per-feature min/max fitted on the training split only."""

    mins: np.ndarray
    maxs: np.ndarray

    @property
    def constant(self) -> np.ndarray:
        """Boolean mask of features with max == min (mapped to 0 everywhere)."""
        return self.maxs <= self.mins

    def to_dict(self) -> dict:
        return {"mins": self.mins.tolist(), "maxs": self.maxs.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Normalizer":
        return cls(np.asarray(d["mins"], dtype=float), np.asarray(d["maxs"], dtype=float))


@dataclass
class Dataset:
    """Row-major feature matrix with binary labels (0=benign, 1=attack).

    ``labels`` may be None for unlabeled windows (feedback module defers
    rebuilds on those). ``normalizer`` records the transform applied to
    ``features``, or None for raw data.
    """

    features: np.ndarray
    labels: np.ndarray | None
    feature_names: list[str] = field(default_factory=list)
    normalizer: Normalizer | None = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        if self.features.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        if not np.isfinite(self.features).all():
            raise DataError("features contain NaN or Inf")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if self.labels.shape != (self.features.shape[0],):
                raise DataError("labels length does not match feature rows")
            if not np.isin(self.labels, (0, 1)).all():
                raise DataError("labels must be binary 0/1")
        if not self.feature_names:
            self.feature_names = [f"f{i}" for i in range(self.features.shape[1])]

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass
class RawTable:
    """Parsed CSV before label mapping: numeric features + raw label strings."""

    features: np.ndarray
    raw_labels: list[str]
    feature_names: list[str]
    dropped_rows: int


def load_csv(path, has_header: bool = True, label_column: int = -1) -> RawTable:
    """Parse a CSV into a numeric matrix plus the raw label column.

    Rows with non-numeric, NaN or infinite feature values are dropped and
    counted in ``dropped_rows``; a row with the wrong column count raises
    DataError with its line number.
    """
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows: list[list[float]] = []
    raw_labels: list[str] = []
    dropped = 0
    feature_names: list[str] = []
    with fh:
        reader = csv.reader(fh)
        n_cols = None
        for lineno, record in enumerate(reader, start=1):
            if not record:
                continue
            if n_cols is None:
                n_cols = len(record)
                if n_cols < 2:
                    raise DataError(f"line {lineno}: need at least one feature and a label column")
                label_idx = label_column if label_column >= 0 else n_cols + label_column
                if not 0 <= label_idx < n_cols:
                    raise DataError(f"label column {label_column} out of range for {n_cols} columns")
                if has_header:
                    feature_names = [c for i, c in enumerate(record) if i != label_idx]
                    continue
            if len(record) != n_cols:
                raise DataError(f"line {lineno}: expected {n_cols} columns, got {len(record)}")
            label = record[label_idx].strip()
            ok = True
            feats = []
            for i, cell in enumerate(record):
                if i == label_idx:
                    continue
                try:
                    v = float(cell)
                except ValueError:
                    ok = False
                    break
                if not math.isfinite(v):
                    ok = False
                    break
                feats.append(v)
            if ok:
                rows.append(feats)
                raw_labels.append(label)
            else:
                dropped += 1
    if not rows:
        raise DataError(f"{path}: no usable rows (dropped {dropped})")
    features = np.asarray(rows, dtype=float)
    if not feature_names:
        feature_names = [f"f{i}" for i in range(features.shape[1])]
    return RawTable(features, raw_labels, feature_names, dropped)


def binarize_labels(raw_labels, label_map: dict[str, int]) -> np.ndarray:
    """Map raw label strings onto {0, 1}; any unmapped label is an error."""
    out = np.empty(len(raw_labels), dtype=int)
    for i, raw in enumerate(raw_labels):
        key = str(raw).strip()
        if key not in label_map:
            raise DataError(f"unmapped label {key!r}; extend the label map")
        val = int(label_map[key])
        if val not in (0, 1):
            raise DataError(f"label map must target 0 or 1, got {val} for {key!r}")
        out[i] = val
    return out


def fit_normalizer(train: Dataset) -> Normalizer:
    """Fit per-feature min/max on the training split (and only on it)."""
    return Normalizer(train.features.min(axis=0), train.features.max(axis=0))


def apply_normalizer(nz: Normalizer, ds: Dataset) -> Dataset:
    """x' = (x - min) / (max - min), constants to 0, clipped into [0, 1]."""
    if ds.n_features != nz.mins.shape[0]:
        raise DataError("normalizer dimension does not match dataset")
    span = nz.maxs - nz.mins
    safe = np.where(nz.constant, 1.0, span)
    scaled = (ds.features - nz.mins) / safe
    scaled[:, nz.constant] = 0.0
    scaled = np.clip(scaled, 0.0, 1.0)
    return Dataset(scaled, None if ds.labels is None else ds.labels.copy(),
                   list(ds.feature_names), nz)


def stratified_split(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Per-label shuffled split; deterministic for a given seed."""
    if ds.labels is None:
        raise DataError("cannot stratify an unlabeled dataset")
    if not 0.0 < train_fraction < 1.0:
        raise DataError("train_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    train_idx: list[np.ndarray] = []
    test_idx: list[np.ndarray] = []
    for label in (0, 1):
        idx = np.flatnonzero(ds.labels == label)
        if idx.size < 2:
            raise DataError(f"label {label} has {idx.size} rows; need at least 2 to split")
        idx = rng.permutation(idx)
        cut = int(round(train_fraction * idx.size))
        cut = min(max(cut, 1), idx.size - 1)
        train_idx.append(idx[:cut])
        test_idx.append(idx[cut:])
    tr = np.sort(np.concatenate(train_idx))
    te = np.sort(np.concatenate(test_idx))

    def take(sel):
        return Dataset(ds.features[sel], ds.labels[sel], list(ds.feature_names), ds.normalizer)

    return take(tr), take(te)


def synth_icslike(n_rows: int, d: int, class_sep: float = 1.0, noise: float = 0.02,
                  seed: int = 0) -> Dataset:
    """Desk-scale stand-in for the power-system data.

    Two Gaussian clusters separated along a direction concentrated on the
    first ~d/4 features (benign sits at the *higher* feature values), plus a
    quadratic-interaction component in the decision function and a label-noise
    fraction. Deterministic per seed.
    """
    if d < 2:
        raise DataError("need at least 2 features")
    if n_rows <= 0:
        raise DataError("n_rows must be positive")
    rng = np.random.default_rng(seed)
    n_inf = max(2, d // 4)
    w = np.zeros(d)
    w[:n_inf] = 1.0 / math.sqrt(n_inf)
    cluster = rng.integers(0, 2, size=n_rows)  # 1 = attack side (low values)
    shift = 0.22 * class_sep
    centers = 0.5 + shift * np.outer(1 - 2 * cluster, w)
    X = centers + rng.normal(0.0, 0.11, size=(n_rows, d))
    # quadratic interactions between neighbouring informative features bend
    # the boundary away from a pure linear separator
    q = np.zeros(n_rows)
    for i in range(n_inf - 1):
        q += (X[:, i] - 0.5) * (X[:, i + 1] - 0.5)
    score = (X - 0.5) @ w + 0.8 * q
    y = (score < 0.0).astype(int)
    if noise > 0:
        flip = rng.random(n_rows) < noise
        y[flip] = 1 - y[flip]
    if len(np.unique(y)) < 2:  # degenerate draw; nudge one row
        y[0] = 1 - y[0]
    return Dataset(X, y)


def save_csv(ds: Dataset, path, label_names: dict[int, str] | None = None) -> None:
    """Write a dataset in the ingestion CSV schema (header + trailing label).

    Floats are rendered with repr so identical datasets produce identical
    bytes.
    """
    if ds.labels is None:
        raise DataError("cannot save an unlabeled dataset in the labeled schema")
    names = {0: "Natural", 1: "Attack"} if label_names is None else label_names
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(ds.feature_names) + ["marker"])
        for row, label in zip(ds.features, ds.labels):
            writer.writerow([repr(float(v)) for v in row] + [names[int(label)]])


def concat(a: Dataset, b: Dataset) -> Dataset:
    """Row-wise concatenation; both sides must share width and labeledness."""
    if a.n_features != b.n_features:
        raise DataError("datasets differ in feature count")
    if (a.labels is None) != (b.labels is None):
        raise DataError("cannot concatenate labeled with unlabeled data")
    labels = None if a.labels is None else np.concatenate([a.labels, b.labels])
    return Dataset(np.vstack([a.features, b.features]), labels,
                   list(a.feature_names), None)


def subset(ds: Dataset, idx) -> Dataset:
    labels = None if ds.labels is None else ds.labels[idx]
    return Dataset(ds.features[idx], labels, list(ds.feature_names), ds.normalizer)


def relabeled(ds: Dataset, labels) -> Dataset:
    return replace(ds, labels=np.asarray(labels, dtype=int))
