"""Score functions ``T(x, y)`` consumed by the test statistic."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import ValidationError
from . import kernels

LINEAR_RESIDUAL = "linear-residual"
CLASSIFICATION_MARGIN = "classification-margin"
SQUARED_RESIDUAL = "squared-residual"
CUSTOM = "custom"

KINDS = (LINEAR_RESIDUAL, CLASSIFICATION_MARGIN, SQUARED_RESIDUAL, CUSTOM)

_KERNEL_KIND = {
    LINEAR_RESIDUAL: kernels.KIND_ABS_RESIDUAL,
    SQUARED_RESIDUAL: kernels.KIND_SQUARED_RESIDUAL,
    CLASSIFICATION_MARGIN: kernels.KIND_MARGIN,
}


def _check_dims(theta_hat, x):
    theta_hat = np.asarray(theta_hat, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != theta_hat.shape[0]:
        raise ValidationError(
            f"dimension mismatch: x has {x.shape[-1]} entries, theta_hat has {theta_hat.shape[0]}"
        )
    return theta_hat, x


def _check_labels(y):
    y = np.asarray(y, dtype=np.float64)
    if not np.all((y == 1.0) | (y == -1.0)):
        raise ValidationError("classification-margin score needs labels in {-1, +1}")
    return y


def eval_linear_residual(theta_hat, x, y) -> float:
    """``|y - <x, theta_hat>|``."""
    theta_hat, x = _check_dims(theta_hat, x)
    return float(abs(y - x @ theta_hat))


def eval_classification_margin(theta_hat, x, y) -> float:
    """``y * <x, theta_hat>`` for a label ``y`` in {-1, +1}."""
    theta_hat, x = _check_dims(theta_hat, x)
    y = float(_check_labels(y))
    return float(y * (x @ theta_hat))


def eval_squared_residual(theta_hat, x, y) -> float:
    theta_hat, x = _check_dims(theta_hat, x)
    r = y - x @ theta_hat
    return float(r * r)


@dataclass(frozen=True, eq=False)
class ScoreFunction:
    """A deterministic map from ``(x, y)`` to a real score.

    Built-in kinds need ``theta_hat``. For ``custom``, ``func`` maps a
    feature matrix and a response vector to one score per row (set
    ``vectorized=False`` if it only handles one record at a time). The
    statistic's guarantee holds for any fixed score, so nothing else is
    required of ``func`` beyond determinism.
    """

    kind: str
    theta_hat: Optional[np.ndarray] = None
    func: Optional[Callable] = None
    vectorized: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown score kind {self.kind!r}; choose from {KINDS}")
        if self.kind == CUSTOM:
            if self.func is None:
                raise ValidationError("custom score needs a callable func")
        else:
            if self.theta_hat is None:
                raise ValidationError(f"{self.kind} score needs theta_hat")
            th = np.array(self.theta_hat, dtype=np.float64)
            if th.ndim != 1 or not np.isfinite(th).all():
                raise ValidationError("theta_hat must be a finite 1-d vector")
            th.setflags(write=False)
            object.__setattr__(self, "theta_hat", th)

    # constructors read better at call sites than the kind strings
    @classmethod
    def linear_residual(cls, theta_hat):
        return cls(LINEAR_RESIDUAL, theta_hat)

    @classmethod
    def squared_residual(cls, theta_hat):
        return cls(SQUARED_RESIDUAL, theta_hat)

    @classmethod
    def classification_margin(cls, theta_hat):
        return cls(CLASSIFICATION_MARGIN, theta_hat)

    @classmethod
    def custom(cls, func, vectorized=True):
        return cls(CUSTOM, func=func, vectorized=vectorized)

    @property
    def is_linear_family(self) -> bool:
        return self.kind in _KERNEL_KIND

    @property
    def kernel_kind(self) -> int:
        return _KERNEL_KIND[self.kind]

    def __call__(self, x, y) -> float:
        if self.kind == LINEAR_RESIDUAL:
            return eval_linear_residual(self.theta_hat, x, y)
        if self.kind == SQUARED_RESIDUAL:
            return eval_squared_residual(self.theta_hat, x, y)
        if self.kind == CLASSIFICATION_MARGIN:
            return eval_classification_margin(self.theta_hat, x, y)
        if self.vectorized:
            return float(np.asarray(self.func(np.asarray(x)[None, :], np.atleast_1d(y)))[0])
        return float(self.func(x, y))

    def scores(self, X, y) -> np.ndarray:
        """Score every row of ``X`` against the matching entry of ``y``."""
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if self.kind == CUSTOM:
            if self.vectorized:
                out = np.asarray(self.func(X, y), dtype=np.float64)
            else:
                out = np.array([self.func(x, v) for x, v in zip(X, y)], dtype=np.float64)
            if out.shape != y.shape:
                raise ValidationError(
                    f"custom score returned shape {out.shape}, expected {y.shape}"
                )
            return out
        theta, X = _check_dims(self.theta_hat, X)
        pred = X @ theta
        if self.kind == CLASSIFICATION_MARGIN:
            return _check_labels(y) * pred
        res = y - pred
        return np.abs(res) if self.kind == LINEAR_RESIDUAL else res * res


def build_score(kind: str, theta_hat=None) -> ScoreFunction:
    return ScoreFunction(kind, theta_hat)
