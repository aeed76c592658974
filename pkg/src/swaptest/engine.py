"""Swap statistic, finite-sample decision rule and p-values."""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .core import (
    Dataset,
    FeaturePair,
    InsufficientDataError,
    PairedDataset,
    ValidationError,
    all_pairs,
    as_pair,
    split_pairs,
)
from .scores import CLASSIFICATION_MARGIN, ScoreFunction, _check_labels

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
# smallest positive normal double; keeps p-values inside (0, 1]
P_FLOOR = float(np.finfo(np.float64).tiny)


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def tie_key(seed: int, pair) -> int:
    """64-bit key of the tie-breaking coin stream for ``(seed, pair)``.

    The pair is unordered, so ``(i, j)`` and ``(j, i)`` share a stream.
    Coin ``m`` is the top bit of ``splitmix64(key + (m + 1) * golden)``.
    """
    a, b = as_pair(pair).ordered()
    s = _mix64((int(seed) + _GOLDEN) & _MASK)
    return _mix64(((s ^ ((a << 32) | b)) + _GOLDEN) & _MASK)


class NonVacuousWarning(UserWarning):
    """``tau + tau_x >= 1/2``: the rule can never reject."""


@dataclass(frozen=True)
class TestConfig:
    tau: float = 0.0
    tau_x: float = 0.0
    alpha: float = 0.05
    seed: int = 0

    __test__ = False  # not a pytest class

    def __post_init__(self):
        tau, tau_x, alpha = float(self.tau), float(self.tau_x), float(self.alpha)
        if not (tau >= 0 and math.isfinite(tau)):
            raise ValidationError(f"tau must be finite and >= 0, got {self.tau}")
        if not (tau_x >= 0 and math.isfinite(tau_x)):
            raise ValidationError(f"tau_x must be finite and >= 0, got {self.tau_x}")
        _check_alpha(alpha)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "tau_x", tau_x)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "seed", int(self.seed))
        if tau + tau_x >= 0.5:
            warnings.warn(
                f"tau + tau_x = {tau + tau_x} >= 1/2; the test can never reject",
                NonVacuousWarning,
                stacklevel=3,
            )


@dataclass(frozen=True)
class TestReport:
    u_n: float
    n_used: int
    threshold: float
    reject: bool
    p_value: float
    tie_count: int
    degenerate: bool

    __test__ = False

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _check_alpha(alpha):
    if not (0.0 < alpha < 1.0):
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")


def _check_n(n):
    if n < 2:
        raise ValidationError(f"n must be >= 2, got {n}")


def compute_statistic(paired: PairedDataset, score: ScoreFunction, seed: int):
    """Fraction of pairs where the original scores at least the swapped record.

    Exact ties are settled by a reproducible fair coin keyed on
    ``(seed, pair)``. Returns ``(u_n, tie_count)``.
    """
    if paired.half == 0:
        raise ValidationError("paired dataset is empty")
    orig = score.scores(paired.original_features, paired.original_responses)
    swp = score.scores(paired.swapped_features, paired.swapped_responses)
    keys = np.array([tie_key(seed, paired.pair)], dtype=np.uint64)
    wins, ties = kernels.count_wins_batch(orig[None, :], swp[None, :], keys)
    return float(wins[0]) / paired.half, int(ties[0])


def pair_counts(data: Dataset, score: ScoreFunction, pairs: Sequence, seed: int):
    """Win and tie counts of the statistic for many pairs on one dataset.

    Linear-family scores go through the fused kernel, which never builds
    the swapped matrices: swapping ``(i, j)`` moves the prediction by
    ``(x_j - x_i) * (theta_i - theta_j)``. Returns ``(wins, ties, half)``.
    """
    pairs = [as_pair(p) for p in pairs]
    for p in pairs:
        p.check(data.d)
    half = data.n // 2
    if half == 0:
        raise InsufficientDataError(f"need at least 2 records, got n={data.n}")
    keys = np.array([tie_key(seed, p) for p in pairs], dtype=np.uint64)
    X, y = data.features, data.responses
    if score.is_linear_family:
        X1, y1 = X[:half], y[:half]
        X2 = np.ascontiguousarray(X[half : 2 * half])
        y2 = np.ascontiguousarray(y[half : 2 * half])
        orig = np.ascontiguousarray(score.scores(X1, y1))
        if score.kind == CLASSIFICATION_MARGIN:
            _check_labels(y2)
        theta = np.ascontiguousarray(score.theta_hat)
        if theta.shape[0] != data.d:
            raise ValidationError(
                f"dimension mismatch: data has d={data.d}, theta_hat has {theta.shape[0]}"
            )
        base2 = np.ascontiguousarray(X2 @ theta)
        idx = np.array([[p.i, p.j] for p in pairs], dtype=np.int64).reshape(-1, 2)
        wins, ties = kernels.linear_family_counts(
            X2, base2, y2, orig, theta, idx, keys, score.kernel_kind
        )
    else:
        orig = score.scores(X[:half], y[:half])
        swp = np.empty((len(pairs), half))
        for r, p in enumerate(pairs):
            paired = split_pairs(data, p)
            swp[r] = score.scores(paired.swapped_features, paired.swapped_responses)
        a = np.ascontiguousarray(np.broadcast_to(orig, swp.shape))
        wins, ties = kernels.count_wins_batch(a, swp, keys)
    return wins, ties, half


def decision_threshold(n: int, cfg: TestConfig) -> float:
    """``tau + tau_x + sqrt(log(2/alpha) / n)`` with ``n`` the samples used."""
    _check_n(n)
    _check_alpha(cfg.alpha)
    return cfg.tau + cfg.tau_x + math.sqrt(math.log(2.0 / cfg.alpha) / n)


def p_value(u_n, n: int, tau: float = 0.0, tau_x: float = 0.0):
    """Hoeffding p-value of the statistic.

    One inside the band ``|u_n - 1/2| <= tau + tau_x``, otherwise
    ``min(1, 2 exp(-n (|u_n - 1/2| - tau - tau_x)^2))``. Results that
    would underflow are floored at :data:`P_FLOOR`. Accepts arrays.
    """
    u = np.asarray(u_n, dtype=np.float64)
    if np.any((u < 0) | (u > 1)):
        raise ValidationError("u_n must lie in [0, 1]")
    excess = np.abs(u - 0.5) - tau - tau_x
    eta = 2.0 * np.exp(-n * np.square(np.maximum(excess, 0.0)))
    p = np.where(excess <= 0, 1.0, np.clip(eta, P_FLOOR, 1.0))
    return float(p) if p.ndim == 0 else p


def _report(wins, ties, half, pair: FeaturePair, cfg: TestConfig) -> TestReport:
    n_used = 2 * half
    u_n = float(wins) / half
    thr = decision_threshold(n_used, cfg)
    return TestReport(
        u_n=u_n,
        n_used=n_used,
        threshold=thr,
        reject=bool(abs(u_n - 0.5) >= thr),
        p_value=p_value(u_n, n_used, cfg.tau, cfg.tau_x),
        tie_count=int(ties),
        degenerate=pair.degenerate,
    )


def run_test(data: Dataset, pair, score: ScoreFunction, cfg: TestConfig) -> TestReport:
    """Run the closeness-of-influence test for one feature pair."""
    pair = as_pair(pair)
    wins, ties, half = pair_counts(data, score, [pair], cfg.seed)
    return _report(wins[0], ties[0], half, pair, cfg)


def run_all_pairs(data: Dataset, score: ScoreFunction, cfg: TestConfig, pairs=None) -> dict:
    """Test every pair (default: all ``i < j``). Keys are ``(i, j)`` tuples."""
    pairs = [as_pair(p) for p in (pairs if pairs is not None else all_pairs(data.d))]
    wins, ties, half = pair_counts(data, score, pairs, cfg.seed)
    return {
        (p.i, p.j): _report(w, t, half, p, cfg) for p, w, t in zip(pairs, wins, ties)
    }


def batch_statistics(orig_scores, swapped_scores, keys):
    """Statistics for a stack of independent tests, one per row.

    Returns ``(u, ties)`` arrays; ``keys`` seeds each row's tie coins.
    """
    a = np.ascontiguousarray(orig_scores, dtype=np.float64)
    b = np.ascontiguousarray(swapped_scores, dtype=np.float64)
    wins, ties = kernels.count_wins_batch(a, b, np.asarray(keys, dtype=np.uint64))
    return wins / a.shape[1], ties
