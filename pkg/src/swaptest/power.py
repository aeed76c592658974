"""Power calculators built on the ordinal dominance curve (ODC).

For scores ``T1 = T(X, Y)`` and ``T2 = T(X'_swap, Y')`` with CDFs ``F`` and
``G``, the test detects a difference once
``|int_0^1 (F(G^-1(u)) - u) du| >= rho_n + tau_x``. This module evaluates
``rho_n``, closed forms of the integral for the linear-regression and
Gaussian-mixture settings, the implied minimum detectable gaps, and a Monte
Carlo estimate of the integral for arbitrary samplers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special

from .core import Dataset, ValidationError, as_pair
from .scores import ScoreFunction


def norm_cdf(x):
    """Standard normal CDF."""
    return special.ndtr(x)


def norm_ppf(u):
    """Standard normal quantile."""
    return special.ndtri(u)


@dataclass(frozen=True)
class PowerQuery:
    n: int
    alpha: float
    beta: float
    tau: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n}")
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValidationError(f"{name} must lie in (0, 1), got {v}")
        if not (self.tau >= 0 and math.isfinite(self.tau)):
            raise ValidationError(f"tau must be finite and >= 0, got {self.tau}")
        object.__setattr__(self, "n", int(self.n))


def rho_n(q: PowerQuery) -> float:
    """``2 exp(-n beta^2) + sqrt(log(2/alpha) / n) + tau``."""
    return 2.0 * math.exp(-q.n * q.beta**2) + math.sqrt(math.log(2.0 / q.alpha) / q.n) + q.tau


def detectable(deviation: float, q: PowerQuery, tau_x: float = 0.0) -> bool:
    """Whether an ODC deviation clears the bar that guarantees power ``1 - beta``."""
    return abs(deviation) >= rho_n(q) + tau_x


def _pair_vectors(a, b, pair):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape:
        raise ValidationError(f"vectors must be 1-d with equal length, got {a.shape} and {b.shape}")
    pair = as_pair(pair)
    pair.check(a.shape[0])
    return a, b, pair


def odc_deviation_linear(theta_star, theta_hat, sigma: float, pair, signed: bool = False) -> float:
    """ODC deviation of the absolute-residual score in ``y = x'theta* + N(0, sigma^2)``.

    Features are ``N(0, I)``. With ``s1^2 = sigma^2 + |theta* - theta_hat|^2``
    and ``s2^2`` the same with ``theta_hat`` swapped, the integral equals
    ``(2/pi) arctan((s2 - s1) / (s1 + s2))``. By default its magnitude is
    returned; ``signed=True`` keeps the orientation of ``F(G^-1(u)) - u``.
    """
    if not sigma > 0:
        raise ValidationError(f"sigma must be > 0, got {sigma}")
    theta_star, theta_hat, pair = _pair_vectors(theta_star, theta_hat, pair)
    swapped = theta_hat.copy()
    swapped[[pair.i, pair.j]] = theta_hat[[pair.j, pair.i]]
    s1 = math.sqrt(sigma**2 + float(np.sum((theta_star - theta_hat) ** 2)))
    s2 = math.sqrt(sigma**2 + float(np.sum((theta_star - swapped) ** 2)))
    value = (2.0 / math.pi) * math.atan((s2 - s1) / (s1 + s2))
    return value if signed else abs(value)


def odc_deviation_binary(mu, theta_hat, pair, signed: bool = False) -> float:
    """ODC deviation of the margin score ``y x'theta_hat`` under ``x ~ N(y mu, I)``.

    Equals ``Phi(lam / sqrt 2) - 1/2`` with
    ``lam = -(theta_i - theta_j)(mu_i - mu_j) / |theta_hat|``; the magnitude
    is ``Phi(|...| / (sqrt 2 |theta_hat|)) - 1/2``. Does not depend on the
    class balance ``q``.
    """
    mu, theta_hat, pair = _pair_vectors(mu, theta_hat, pair)
    norm = float(np.linalg.norm(theta_hat))
    if norm == 0:
        raise ValidationError("theta_hat must be nonzero")
    lam = -(theta_hat[pair.i] - theta_hat[pair.j]) * (mu[pair.i] - mu[pair.j]) / norm
    value = float(norm_cdf(lam / math.sqrt(2.0))) - 0.5
    return value if signed else abs(value)


def min_gap_linear(q: PowerQuery, theta_star, theta_hat, sigma: float, pair) -> Optional[float]:
    """Smallest ``|theta*_i - theta*_j|`` that guarantees power ``1 - beta``.

    Returns ``None`` (infeasible) when ``tan(pi/2 * rho_n) >= 1/2`` or when
    ``theta_hat_i == theta_hat_j``, in which case the score cannot tell the
    two coefficients apart.
    """
    if not sigma > 0:
        raise ValidationError(f"sigma must be > 0, got {sigma}")
    theta_star, theta_hat, pair = _pair_vectors(theta_star, theta_hat, pair)
    contrast = abs(theta_hat[pair.i] - theta_hat[pair.j])
    r = rho_n(q)
    if contrast == 0 or r >= 1.0:
        return None
    t = math.tan(0.5 * math.pi * r)
    if t >= 0.5:
        return None
    err = sigma**2 + float(np.sum((theta_hat - theta_star) ** 2))
    return 2.0 * t / (1.0 - 2.0 * t) * err / contrast


def min_gap_binary(q: PowerQuery, theta_hat, pair) -> Optional[float]:
    """Smallest ``|mu_i - mu_j|`` that guarantees power ``1 - beta`` in the mixture model.

    The guarantee is for ``tau = 0``, so ``q.tau`` is ignored. ``None`` when
    ``rho_n >= 1/2`` or ``theta_hat_i == theta_hat_j``.
    """
    theta_hat = np.asarray(theta_hat, dtype=np.float64)
    _, theta_hat, pair = _pair_vectors(theta_hat, theta_hat, pair)
    contrast = abs(theta_hat[pair.i] - theta_hat[pair.j])
    r = rho_n(PowerQuery(q.n, q.alpha, q.beta, 0.0))
    if contrast == 0 or r >= 0.5:
        return None
    return float(norm_ppf(0.5 + r)) * math.sqrt(2.0) * float(np.linalg.norm(theta_hat)) / contrast


# ---------------------------------------------------------------- Monte Carlo


@dataclass(frozen=True)
class OdcEstimate:
    deviation: float
    std_error: float
    n_mc: int


def _integral_sorted(f_sorted: np.ndarray, g_sorted: np.ndarray) -> float:
    n_g = g_sorted.shape[0]
    # G^-1(k/N) = g_(k) on the grid k = 1..N; F(G^-1(0)) = F(-inf) = 0
    F_at = np.searchsorted(f_sorted, g_sorted, side="right") / f_sorted.shape[0]
    v = F_at - np.arange(1, n_g + 1) / n_g
    return float((v[:-1].sum() + 0.5 * v[-1]) / n_g)


def odc_integral(f_samples, g_samples) -> float:
    """Trapezoidal ``int_0^1 (F(G^-1(u)) - u) du`` for empirical ``F`` and ``G``.

    ``G^-1`` is the left-continuous inverse ``inf{t : G(t) >= u}`` and the
    grid step is ``1 / len(g_samples)``. Swap the arguments to get the other
    orientation ``int G(F^-1(u)) du - 1/2``.
    """
    f = np.sort(np.asarray(f_samples, dtype=np.float64))
    g = np.sort(np.asarray(g_samples, dtype=np.float64))
    if f.size == 0 or g.size == 0:
        raise ValidationError("need at least one sample on each side")
    return _integral_sorted(f, g)


def win_rate(t1, t2) -> float:
    """Direct estimate of ``P(T1 >= T2)`` from paired independent draws."""
    t1 = np.asarray(t1, dtype=np.float64)
    t2 = np.asarray(t2, dtype=np.float64)
    return float(np.mean(t1 >= t2))


def _bootstrap_sorted(x_sorted, rng):
    n = x_sorted.shape[0]
    counts = np.bincount(rng.integers(0, n, size=n), minlength=n)
    return np.repeat(x_sorted, counts)


def _draw_scores(score: ScoreFunction, sampler: Callable, n: int, rng) -> np.ndarray:
    out = sampler(n, rng)
    if isinstance(out, Dataset):
        X, y = out.features, out.responses
    else:
        X, y = out
    s = score.scores(X, y)
    if s.shape != (n,):
        raise ValidationError(f"sampler produced {s.shape[0]} scores, expected {n}")
    return s


def odc_monte_carlo(
    score: ScoreFunction,
    sampler_orig: Callable,
    sampler_swap: Callable,
    n_mc: int,
    seed,
    n_boot: int = 200,
    return_samples: bool = False,
):
    """Monte Carlo estimate of the ODC integral with a bootstrap standard error.

    Parameters
    ----------
    score : ScoreFunction
    sampler_orig, sampler_swap : callable
        ``sampler(n, rng)`` returning a :class:`Dataset` or an ``(X, y)``
        tuple; ``sampler_swap`` must already apply the coordinate swap
        (see :func:`swaptest.simgen.swapped_sampler`).
    n_mc : int
        Draws from each law, at least 100.
    seed : int
        Root seed; the two laws and the bootstrap get independent streams.
    n_boot : int
        Bootstrap resamples for the standard error.
    return_samples : bool
        Also return the two raw score samples.

    Returns
    -------
    OdcEstimate, or ``(OdcEstimate, f_scores, g_scores)``.
    """
    if n_mc < 100:
        raise ValidationError(f"n_mc must be >= 100, got {n_mc}")
    rng_f, rng_g, rng_b = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3))
    f = _draw_scores(score, sampler_orig, n_mc, rng_f)
    g = _draw_scores(score, sampler_swap, n_mc, rng_g)
    f_sorted, g_sorted = np.sort(f), np.sort(g)
    dev = _integral_sorted(f_sorted, g_sorted)
    boots = np.array(
        [
            _integral_sorted(_bootstrap_sorted(f_sorted, rng_b), _bootstrap_sorted(g_sorted, rng_b))
            for _ in range(n_boot)
        ]
    )
    est = OdcEstimate(dev, float(boots.std(ddof=1)), int(n_mc))
    if return_samples:
        return est, f, g
    return est
