"""User-based collaborative filtering with raw cosine similarity.

Used as the point-prediction baseline for the granular model. Missing
ratings are stored as NaN.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

from .data import n_test_records
from .errors import DimensionError, InvalidInputError, LookupFailure, ParseError


@dataclass(frozen=True)
class RatingMatrix:
    users: tuple
    items: tuple
    ratings: np.ndarray  # users x items, NaN where unrated

    def __post_init__(self):
        r = np.array(self.ratings, dtype=float)
        if r.shape != (len(self.users), len(self.items)):
            raise DimensionError(
                f"ratings shape {r.shape} for {len(self.users)} users x {len(self.items)} items"
            )
        if np.any(np.isinf(r)):
            raise InvalidInputError("ratings must be finite")
        r.setflags(write=False)
        object.__setattr__(self, "users", tuple(self.users))
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "ratings", r)
        object.__setattr__(self, "_uidx", {u: i for i, u in enumerate(self.users)})
        object.__setattr__(self, "_iidx", {t: i for i, t in enumerate(self.items)})

    @classmethod
    def from_triples(cls, triples: Iterable[tuple[Hashable, Hashable, float]]) -> "RatingMatrix":
        triples = list(triples)
        users = sorted({u for u, _, _ in triples}, key=str)
        items = sorted({t for _, t, _ in triples}, key=str)
        uidx = {u: i for i, u in enumerate(users)}
        iidx = {t: i for i, t in enumerate(items)}
        r = np.full((len(users), len(items)), np.nan)
        for u, t, v in triples:
            r[uidx[u], iidx[t]] = float(v)
        return cls(tuple(users), tuple(items), r)

    def user_index(self, user) -> int:
        try:
            return self._uidx[user]
        except KeyError:
            raise LookupFailure(f"unknown user {user!r}") from None

    def item_index(self, item) -> int:
        try:
            return self._iidx[item]
        except KeyError:
            raise LookupFailure(f"unknown item {item!r}") from None

    def user_mean(self, user) -> float:
        row = self.ratings[self.user_index(user)]
        if np.all(np.isnan(row)):
            raise InvalidInputError(f"user {user!r} has no ratings")
        return float(np.nanmean(row))

    def triples(self) -> list[tuple]:
        out = []
        for i, j in zip(*np.nonzero(~np.isnan(self.ratings))):
            out.append((self.users[i], self.items[j], float(self.ratings[i, j])))
        return out


def cosine_similarity(u, v) -> float:
    """Cosine of two rating vectors over their co-rated entries.

    No co-rated entries, or a zero norm on the co-rated part, gives 0.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DimensionError(f"vectors of shape {u.shape} and {v.shape}")
    both = ~(np.isnan(u) | np.isnan(v))
    if not np.any(both):
        return 0.0
    a, b = u[both], v[both]
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    if denom == 0.0:
        return 0.0
    return float(np.clip(np.dot(a, b) / denom, -1.0, 1.0))


def neighbours(matrix: RatingMatrix, user, item, k: int) -> list[tuple[int, float]]:
    """The ``k`` most similar users with a positive similarity who rated ``item``.

    Returned as ``(user_index, similarity)``. Similarities are compared at 12
    decimals so rounding noise cannot reorder equal values; ties keep user order.
    """
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    ui = matrix.user_index(user)
    ti = matrix.item_index(item)
    R = matrix.ratings
    candidates = []
    for vi in range(len(matrix.users)):
        if vi == ui or np.isnan(R[vi, ti]):
            continue
        s = cosine_similarity(R[ui], R[vi])
        if s > 0.0:
            candidates.append((vi, s))
    candidates.sort(key=lambda c: (-round(c[1], 12), c[0]))
    return candidates[:k]


def predict_knn(matrix: RatingMatrix, user, item, k: int) -> float:
    """Similarity-weighted mean of the nearest neighbours' ratings of ``item``.

    Falls back to the user's mean rating when no neighbour qualifies.
    """
    nbrs = neighbours(matrix, user, item, k)
    if not nbrs:
        return matrix.user_mean(user)
    ti = matrix.item_index(item)
    w = np.array([s for _, s in nbrs])
    r = np.array([matrix.ratings[vi, ti] for vi, _ in nbrs])
    return float(np.dot(w, r) / w.sum())


def mae(predictions: Sequence[float], truths: Sequence[float]) -> float:
    p = np.asarray(predictions, dtype=float).ravel()
    r = np.asarray(truths, dtype=float).ravel()
    if p.size != r.size:
        raise InvalidInputError(f"{p.size} predictions for {r.size} truths")
    if p.size == 0:
        raise InvalidInputError("mae of an empty list")
    return float(np.mean(np.abs(p - r)))


def split_ratings(triples: Sequence[tuple], train_fraction: float, seed: int):
    """Seeded shuffle then prefix split of rating triples."""
    if not 0.0 < train_fraction < 1.0:
        raise InvalidInputError("train fraction must lie in (0, 1)")
    order = np.random.default_rng(seed).permutation(len(triples))
    n_train = len(triples) - n_test_records(len(triples), train_fraction)
    train = [triples[i] for i in order[:n_train]]
    test = [triples[i] for i in order[n_train:]]
    return train, test


def evaluate_knn(train: Sequence[tuple], test: Sequence[tuple], k: int) -> float:
    """MAE of kNN predictions on held-out triples.

    Test pairs whose user or item never appears in ``train`` are skipped.
    """
    matrix = RatingMatrix.from_triples(train)
    preds, truths = [], []
    for u, t, v in test:
        if u not in matrix._uidx or t not in matrix._iidx:
            continue
        preds.append(predict_knn(matrix, u, t, k))
        truths.append(v)
    return mae(preds, truths)


def load_ratings(path: str | os.PathLike) -> list[tuple[str, str, float]]:
    """Read ``user,item,rating`` rows; a header row is optional."""
    triples = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rowno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ParseError(f"expected user,item,rating; got {len(row)} fields", row=rowno)
            try:
                value = float(row[2])
            except ValueError:
                if rowno == 1:
                    continue  # header
                raise ParseError(f"not a number: {row[2]!r}", row=rowno, column="rating") from None
            if not np.isfinite(value):
                raise ParseError("rating must be finite", row=rowno, column="rating")
            triples.append((row[0].strip(), row[1].strip(), value))
    if not triples:
        raise InvalidInputError(f"no ratings in {path}")
    return triples
