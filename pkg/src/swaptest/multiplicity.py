"""Benjamini-Yekutieli false discovery rate control over pairwise p-values."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .core import ValidationError
from .engine import batch_statistics, p_value, tie_key
from .seeding import int_seed, rng_for


@dataclass(frozen=True)
class PvalueBatch:
    entries: tuple
    q: float

    def __post_init__(self):
        entries = tuple((key, float(p)) for key, p in self.entries)
        if not entries:
            raise ValidationError("p-value batch is empty")
        for key, p in entries:
            if not (0.0 < p <= 1.0):
                raise ValidationError(f"p-value for {key!r} must lie in (0, 1], got {p}")
        if not 0.0 <= self.q <= 1.0:
            raise ValidationError(f"q must lie in [0, 1], got {self.q}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_pairs(cls, ids: Sequence[Hashable], pvalues: Sequence[float], q: float):
        if len(ids) != len(pvalues):
            raise ValidationError("ids and p-values differ in length")
        return cls(tuple(zip(ids, pvalues)), q)


def harmonic(m: int) -> float:
    return math.fsum(1.0 / k for k in range(1, m + 1))


def by_reject_mask(pvalues, q: float) -> np.ndarray:
    """Boolean mask of hypotheses rejected by the BY step-up rule.

    Sort ascending, find the largest rank ``t`` with
    ``p_(t) <= t q / (m c_m)`` where ``c_m = sum_{i<=m} 1/i``, and reject
    every p-value up to ``p_(t)``; ties at the cut are all rejected.
    """
    p = np.asarray(pvalues, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValidationError("need a non-empty 1-d array of p-values")
    m = p.size
    p_sorted = np.sort(p)
    crit = np.arange(1, m + 1) * q / (m * harmonic(m))
    below = np.flatnonzero(p_sorted <= crit)
    if below.size == 0:
        return np.zeros(m, dtype=bool)
    return p <= p_sorted[below[-1]]


def benjamini_yekutieli(batch: PvalueBatch) -> frozenset:
    """Ids of the rejected hypotheses."""
    ids = [key for key, _ in batch.entries]
    mask = by_reject_mask([p for _, p in batch.entries], batch.q)
    return frozenset(key for key, hit in zip(ids, mask) if hit)


def fdr_replicate(
    null_fraction: float,
    m: int,
    q: float,
    replicate: int,
    seed: int,
    n: int = 400,
    theta_null=(2.0, 2.0),
    theta_alt=(1.0, 3.0),
    theta_hat_noise: float = 0.5,
) -> float:
    """False-discovery proportion of BY on one simulated batch of ``m`` tests.

    Each test covers the pair (0, 1) on its own linear-regression dataset of
    ``n`` rows with ``x ~ N(0, I_2)``. The first ``round(null_fraction * m)``
    tests use equal coefficients ``theta_null`` (a true null), the rest use
    ``theta_alt``. The absolute-residual score uses
    ``theta_hat = theta* + N(0, theta_hat_noise^2 I)``.
    """
    if not 0.0 <= null_fraction <= 1.0:
        raise ValidationError(f"null_fraction must lie in [0, 1], got {null_fraction}")
    if m < 1:
        raise ValidationError("m must be >= 1")
    if n < 2:
        raise ValidationError("n must be >= 2")
    m0 = int(round(null_fraction * m))
    theta_star = np.empty((m, 2))
    theta_star[:m0] = theta_null
    theta_star[m0:] = theta_alt
    half = n // 2
    rng = rng_for(seed, "fdr-check", replicate)
    X = rng.standard_normal((m, 2 * half, 2))
    y = np.einsum("kni,ki->kn", X, theta_star) + rng.standard_normal((m, 2 * half))
    theta_hat = theta_star + theta_hat_noise * rng.standard_normal((m, 2))
    X1, X2 = X[:, :half], X[:, half:]
    orig = np.abs(y[:, :half] - np.einsum("kni,ki->kn", X1, theta_hat))
    # swapping the two coordinates of a d=2 row reverses it
    swp = np.abs(y[:, half:] - np.einsum("kni,ki->kn", X2[:, :, ::-1], theta_hat))
    keys = [tie_key(int_seed(seed, "fdr-check", replicate, k), (0, 1)) for k in range(m)]
    u, _ = batch_statistics(orig, swp, keys)
    rejected = by_reject_mask(p_value(u, 2 * half), q)
    return float(rejected[:m0].sum() / max(int(rejected.sum()), 1))


def fdr_simulation_check(null_fraction: float, m: int, q: float, replicates: int, seed: int, **kwargs) -> float:
    """Mean false-discovery proportion of BY over ``replicates`` batches.

    See :func:`fdr_replicate` for the simulated design; extra keyword
    arguments are passed through to it.
    """
    if replicates < 1:
        raise ValidationError("replicates must be >= 1")
    return float(
        np.mean([fdr_replicate(null_fraction, m, q, r, seed, **kwargs) for r in range(replicates)])
    )
