"""Datasets, the coordinate swap and the half/half pairing split."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from typing import Iterable

import numpy as np


class ValidationError(ValueError):
    """Raised for malformed inputs: bad indices, shapes, domains or files."""


class InsufficientDataError(ValidationError):
    """Raised when a dataset is too small to form a single pair."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """``n`` feature rows in ``R^d`` with one real response per row.

    Arrays are copied on construction and made read-only.
    """

    features: np.ndarray
    responses: np.ndarray

    def __post_init__(self):
        X = np.array(self.features, dtype=np.float64)
        y = np.array(self.responses, dtype=np.float64)
        if X.ndim != 2:
            raise ValidationError(f"features must be a 2-d array, got shape {X.shape}")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ValidationError(
                f"responses must have length {X.shape[0]}, got shape {y.shape}"
            )
        if X.shape[1] < 2:
            raise ValidationError(f"need at least 2 features, got d={X.shape[1]}")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise ValidationError("features and responses must be finite")
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "responses", _frozen(y))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def __len__(self):
        return self.n

    def take(self, rows) -> "Dataset":
        return Dataset(self.features[rows], self.responses[rows])

    def shuffled(self, seed) -> "Dataset":
        """Rows permuted by a seeded generator."""
        perm = np.random.default_rng(seed).permutation(self.n)
        return self.take(perm)


@dataclass(frozen=True)
class FeaturePair:
    """Two 0-based coordinate indices. ``i == j`` is allowed (degenerate)."""

    i: int
    j: int

    def __post_init__(self):
        for name in ("i", "j"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 0:
                raise ValidationError(f"pair index {name}={v!r} must be a non-negative int")
            object.__setattr__(self, name, int(v))

    @classmethod
    def from_one_based(cls, i: int, j: int) -> "FeaturePair":
        if i < 1 or j < 1:
            raise ValidationError(f"1-based feature indices must be >= 1, got ({i}, {j})")
        return cls(i - 1, j - 1)

    @property
    def degenerate(self) -> bool:
        return self.i == self.j

    def ordered(self) -> tuple[int, int]:
        return (self.i, self.j) if self.i <= self.j else (self.j, self.i)

    def check(self, d: int) -> None:
        if self.i >= d or self.j >= d:
            raise ValidationError(f"pair ({self.i}, {self.j}) out of range for d={d}")

    def __iter__(self):
        return iter((self.i, self.j))


def as_pair(pair) -> FeaturePair:
    if isinstance(pair, FeaturePair):
        return pair
    i, j = pair
    return FeaturePair(i, j)


def all_pairs(d: int, include_diagonal: bool = False) -> list[FeaturePair]:
    """Every unordered pair ``i <= j`` (or ``i < j``) in row-major order."""
    start = 0 if include_diagonal else 1
    return [FeaturePair(i, j) for i in range(d) for j in range(i + start, d)]


def swap_coordinates(x, i: int, j: int) -> np.ndarray:
    """Copy of ``x`` with entries ``i`` and ``j`` exchanged.

    Works on a single vector or on the last axis of a matrix of rows.
    """
    x = np.asarray(x)
    d = x.shape[-1]
    for v in (i, j):
        if not 0 <= v < d:
            raise ValidationError(f"index {v} out of range for length {d}")
    out = np.array(x, copy=True)
    out[..., [i, j]] = x[..., [j, i]]
    return out


@dataclass(frozen=True, eq=False)
class PairedDataset:
    """Output of :func:`split_pairs`.

    ``swapped_features[m]`` is row ``m + n/2`` of the source with the pair
    exchanged; ``swapped_responses[m]`` is its untouched response.
    """

    original_features: np.ndarray
    original_responses: np.ndarray
    swapped_features: np.ndarray
    swapped_responses: np.ndarray
    pair: FeaturePair
    n_dropped: int = 0

    @property
    def half(self) -> int:
        return self.original_features.shape[0]

    @property
    def n_used(self) -> int:
        return 2 * self.half


def split_pairs(data: Dataset, pair, shuffle_seed=None) -> PairedDataset:
    """Pair record ``m`` with the swapped record ``m + n/2``.

    An odd trailing record is dropped. With ``shuffle_seed`` the rows are
    permuted first; without it the split is fully deterministic, which is
    valid whenever the rows are i.i.d.
    """
    pair = as_pair(pair)
    pair.check(data.d)
    if data.n < 2:
        raise InsufficientDataError(f"need at least 2 records, got n={data.n}")
    if shuffle_seed is not None:
        data = data.shuffled(shuffle_seed)
    half = data.n // 2
    X, y = data.features, data.responses
    second = X[half : 2 * half]
    return PairedDataset(
        original_features=_frozen(X[:half].copy()),
        original_responses=_frozen(y[:half].copy()),
        swapped_features=_frozen(swap_coordinates(second, pair.i, pair.j)),
        swapped_responses=_frozen(y[half : 2 * half].copy()),
        pair=pair,
        n_dropped=data.n - 2 * half,
    )


# ---------------------------------------------------------------- CSV I/O


def _parse_float(text: str, lineno: int, column: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ValidationError(f"line {lineno}: column {column!r}: not a number: {text!r}") from None
    if not math.isfinite(v):
        raise ValidationError(f"line {lineno}: column {column!r}: non-finite value {text!r}")
    return v


def parse_csv(lines: Iterable[str]) -> Dataset:
    """Parse the ``x1,...,xd,y`` schema. Errors name the offending line."""
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError("line 1: empty file, expected header x1,...,xd,y") from None
    header = [h.strip() for h in header]
    d = len(header) - 1
    expected = [f"x{k}" for k in range(1, d + 1)] + ["y"]
    if d < 2 or header != expected:
        raise ValidationError(
            f"line 1: header must be x1,...,xd,y with d >= 2, got {','.join(header)!r}"
        )
    rows, ys = [], []
    for record in reader:
        lineno = reader.line_num
        if not record or all(not c.strip() for c in record):
            continue
        if len(record) != d + 1:
            raise ValidationError(
                f"line {lineno}: expected {d + 1} fields, got {len(record)}"
            )
        vals = [_parse_float(c.strip(), lineno, header[k]) for k, c in enumerate(record)]
        rows.append(vals[:d])
        ys.append(vals[d])
    if not rows:
        raise InsufficientDataError("no data records after the header")
    return Dataset(np.array(rows), np.array(ys))


def read_csv(path) -> Dataset:
    with open(path, newline="") as fh:
        return parse_csv(fh)


def format_csv(data: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"x{k}" for k in range(1, data.d + 1)] + ["y"])
    for x, y in zip(data.features, data.responses):
        writer.writerow([repr(float(v)) for v in x] + [repr(float(y))])
    return buf.getvalue()


def write_csv(data: Dataset, path) -> None:
    d = os.path.dirname(os.fspath(path))
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(format_csv(data))


def load_vector(spec) -> np.ndarray:
    """Load a real vector from an inline JSON array or a single-column CSV path.

    Accepts an already-parsed list too, which is how experiment configs
    pass it in.
    """
    if isinstance(spec, (list, tuple, np.ndarray)):
        vec = np.asarray(spec, dtype=np.float64)
    else:
        text = str(spec).strip()
        if text.startswith("["):
            try:
                vec = np.asarray(json.loads(text), dtype=np.float64)
            except (ValueError, TypeError) as exc:
                raise ValidationError(f"invalid JSON vector: {exc}") from None
        else:
            vals = []
            with open(text, newline="") as fh:
                for lineno, record in enumerate(csv.reader(fh), start=1):
                    if not record or not record[0].strip():
                        continue
                    if len(record) != 1:
                        raise ValidationError(
                            f"{text}: line {lineno}: expected a single column, got {len(record)}"
                        )
                    cell = record[0].strip()
                    try:
                        vals.append(float(cell))
                    except ValueError:
                        if lineno == 1:
                            continue  # header
                        raise ValidationError(
                            f"{text}: line {lineno}: not a number: {cell!r}"
                        ) from None
            vec = np.asarray(vals, dtype=np.float64)
    if vec.ndim != 1 or vec.size == 0:
        raise ValidationError("expected a non-empty 1-d vector")
    if not np.isfinite(vec).all():
        raise ValidationError("vector entries must be finite")
    return vec
