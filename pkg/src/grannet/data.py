"""Tabular dataset loading, min-max scaling and seeded splitting."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, replace
from importlib import resources

import numpy as np

from .errors import DimensionError, InvalidInputError, ParseError
from .interval import Interval


@dataclass(frozen=True)
class Scaler:
    feature_min: np.ndarray
    feature_max: np.ndarray
    target_min: float
    target_max: float

    @classmethod
    def fit(cls, features: np.ndarray, targets: np.ndarray) -> "Scaler":
        return cls(features.min(axis=0), features.max(axis=0),
                   float(targets.min()), float(targets.max()))

    @property
    def feature_range(self) -> np.ndarray:
        return self.feature_max - self.feature_min

    @property
    def target_range(self) -> float:
        return self.target_max - self.target_min

    def transform_features(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        span = self.feature_range
        safe = np.where(span > 0, span, 1.0)
        # constant columns collapse to 0
        return np.where(span > 0, (X - self.feature_min) / safe, 0.0)

    def inverse_features(self, Z) -> np.ndarray:
        return np.asarray(Z, dtype=float) * self.feature_range + self.feature_min

    def transform_target(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.target_range == 0:
            return np.zeros_like(y)
        return (y - self.target_min) / self.target_range

    def inverse_target(self, z) -> np.ndarray:
        return np.asarray(z, dtype=float) * self.target_range + self.target_min

    def inverse_target_interval(self, iv: Interval) -> Interval:
        # target_range >= 0, so the map is nondecreasing and keeps lo <= hi
        lo, hi = self.inverse_target([iv.lo, iv.hi])
        return Interval(lo, hi)

    def to_dict(self) -> dict:
        return {
            "feature_min": self.feature_min.tolist(),
            "feature_max": self.feature_max.tolist(),
            "target_min": self.target_min,
            "target_max": self.target_max,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Scaler":
        return cls(np.asarray(doc["feature_min"], dtype=float),
                   np.asarray(doc["feature_max"], dtype=float),
                   float(doc["target_min"]), float(doc["target_max"]))


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    targets: np.ndarray
    feature_names: tuple[str, ...]
    target_name: str = "target"
    scaler: Scaler | None = None

    def __post_init__(self):
        X = np.array(self.features, dtype=float)
        y = np.array(self.targets, dtype=float).ravel()
        if X.ndim != 2:
            raise DimensionError("features must be a 2-d array")
        if X.shape[0] != y.size:
            raise DimensionError(f"{X.shape[0]} feature rows but {y.size} targets")
        if X.shape[0] == 0:
            raise InvalidInputError("dataset has no records")
        if len(self.feature_names) != X.shape[1]:
            raise DimensionError("feature_names length does not match feature columns")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise InvalidInputError("dataset contains non-finite values")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "targets", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def m(self) -> int:
        return self.features.shape[1]

    def subset(self, index) -> "Dataset":
        index = np.asarray(index, dtype=int)
        return replace(self, features=self.features[index], targets=self.targets[index])


def load_dataset(path: str | os.PathLike) -> Dataset:
    """Read a CSV with a header row: feature columns first, target column last."""
    path = os.fspath(path)
    if not os.path.exists(path):
        raise ParseError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        return _parse_dataset(fh)


def bundled_dataset_path():
    return resources.files("grannet") / "data" / "news_attention.csv"


def load_bundled_dataset() -> Dataset:
    """The bundled 200-record, 5-attribute synthetic news dataset."""
    with bundled_dataset_path().open("r", encoding="utf-8", newline="") as fh:
        return _parse_dataset(fh)


def _parse_dataset(fh) -> Dataset:
    reader = csv.reader(fh)
    header = next(reader, None)
    if not header:
        raise ParseError("missing header row", row=1)
    header = [h.strip() for h in header]
    if len(header) < 2:
        raise ParseError("need at least one feature column and a target column", row=1)
    rows = []
    for rowno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", row=rowno)
        values = []
        for col, cell in zip(header, row):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"not a number: {cell!r}", row=rowno, column=col) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite value {cell!r}", row=rowno, column=col)
            values.append(v)
        rows.append(values)
    if not rows:
        raise InvalidInputError("dataset has a header but no records")
    arr = np.array(rows)
    return Dataset(arr[:, :-1], arr[:, -1], tuple(header[:-1]), header[-1])


def save_dataset(ds: Dataset, path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(list(ds.feature_names) + [ds.target_name])
        for x, t in zip(ds.features, ds.targets):
            w.writerow([repr(float(v)) for v in x] + [repr(float(t))])


def normalize(ds: Dataset, scaler: Scaler | None = None) -> Dataset:
    """Min-max scale features and target.

    Fits a new scaler unless one is given; the scaler is kept on the result so
    output intervals can be mapped back to the raw target scale.
    """
    if scaler is None:
        scaler = Scaler.fit(ds.features, ds.targets)
    elif scaler.feature_min.shape != (ds.m,):
        raise DimensionError(f"scaler covers {scaler.feature_min.size} features, dataset has {ds.m}")
    return replace(
        ds,
        features=scaler.transform_features(ds.features),
        targets=scaler.transform_target(ds.targets),
        scaler=scaler,
    )


def n_test_records(n: int, train_fraction: float) -> int:
    """``ceil((1 - train_fraction) * n)``, immune to binary rounding of the fraction."""
    return int(math.ceil(round((1.0 - train_fraction) * n, 9)))


def split(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded shuffle followed by a prefix split into train and test parts."""
    if not 0.0 < train_fraction < 1.0:
        raise InvalidInputError("train fraction must lie in (0, 1)")
    n_test = n_test_records(ds.n, train_fraction)
    if n_test >= ds.n:
        raise InvalidInputError(f"split leaves no training records (n={ds.n})")
    order = np.random.default_rng(seed).permutation(ds.n)
    n_train = ds.n - n_test
    return ds.subset(order[:n_train]), ds.subset(order[n_train:])


def make_news_attention(n: int = 200, seed: int = 2024, noise: float = 0.03) -> Dataset:
    """Synthetic news records whose attention score depends nonlinearly on
    four attributes and not at all on the fifth (``length``).
    """
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 1.0, size=(n, 5))
    signal = (
        2.0 * np.sin(np.pi * u[:, 0])
        + 4.0 * (u[:, 1] - 0.5) ** 2
        + 1.5 * u[:, 2] * u[:, 3]
    )
    signal = signal + noise * rng.standard_normal(n) * np.ptp(signal)
    lo, hi = signal.min(), signal.max()
    attention = 1.0 + 9.0 * (signal - lo) / (hi - lo)
    raw = u * np.array([10.0, 100.0, 5.0, 1.0, 2000.0])
    names = ("politics", "economy", "culture", "sociality", "length")
    return Dataset(np.round(raw, 6), np.round(attention, 6), names, "attention")



def make_ratings(n_users: int = 60, n_items: int = 40, density: float = 0.4,
                 rank: int = 3, seed: int = 7) -> list[tuple[str, str, float]]:
    """Synthetic 1-5 star ratings from a low-rank taste model."""
    rng = np.random.default_rng(seed)
    taste = rng.normal(size=(n_users, rank))
    profile = rng.normal(size=(n_items, rank))
    score = taste @ profile.T / np.sqrt(rank)
    stars = np.clip(np.round(3.0 + 1.2 * score + 0.5 * rng.standard_normal(score.shape)), 1, 5)
    mask = rng.random(score.shape) < density
    return [
        (f"u{u:03d}", f"n{i:03d}", float(stars[u, i]))
        for u in range(n_users)
        for i in range(n_items)
        if mask[u, i]
    ]


def bundled_ratings_path():
    return resources.files("grannet") / "data" / "ratings.csv"
