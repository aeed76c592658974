"""Seeded synthetic data for the size, power and datamodel experiments.

Every generator takes ``seed`` as an int, a ``SeedSequence`` or a
``numpy.random.Generator`` and uses numpy's PCG64 stream with its ziggurat
normal sampler, so a given seed reproduces the same dataset bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Dataset, ValidationError, as_pair, swap_coordinates

LINEAR = "linear"
QUADRATIC_NULL = "quadratic-null"
GMM = "gmm"
SUBSET_BINARY = "subset-binary"
GENERATOR_KINDS = (LINEAR, QUADRATIC_NULL, GMM, SUBSET_BINARY)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _check_n(n):
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n}")
    return int(n)


def _vector(v, name):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size < 2 or not np.isfinite(v).all():
        raise ValidationError(f"{name} must be a finite vector of length >= 2")
    return v


def gen_linear(n: int, theta_star, sigma: float = 1.0, seed=None) -> Dataset:
    """``x ~ N(0, I_d)``, ``y = x'theta_star + N(0, sigma^2)``."""
    n = _check_n(n)
    theta_star = _vector(theta_star, "theta_star")
    if not sigma > 0:
        raise ValidationError(f"sigma must be > 0, got {sigma}")
    rng = _rng(seed)
    X = rng.standard_normal((n, theta_star.size))
    y = X @ theta_star + sigma * rng.standard_normal(n)
    return Dataset(X, y)


def quadratic_matrix(d: int) -> np.ndarray:
    """``S_ij = 1 + [i == j]``: 2 on the diagonal, 1 elsewhere."""
    return np.ones((d, d)) + np.eye(d)


def quadratic_mean(X) -> np.ndarray:
    """Row-wise ``x'Sx = (sum x)^2 + |x|^2``; invariant under any coordinate swap."""
    X = np.asarray(X, dtype=np.float64)
    return X.sum(axis=-1) ** 2 + np.sum(X * X, axis=-1)


def gen_quadratic_null(n: int, d: int, seed=None) -> Dataset:
    """``x ~ N(0, I_d)``, ``y = x'Sx + N(0, 1)``: every pair is a true null."""
    n = _check_n(n)
    if d < 2:
        raise ValidationError(f"d must be >= 2, got {d}")
    rng = _rng(seed)
    X = rng.standard_normal((n, d))
    y = quadratic_mean(X) + rng.standard_normal(n)
    return Dataset(X, y)


def normalized_ramp(d: int = 10) -> np.ndarray:
    """``(1, 2, ..., d) / |(1, 2, ..., d)|``, the mixture mean of the GMM runs."""
    v = np.arange(1, d + 1, dtype=np.float64)
    return v / np.linalg.norm(v)


def gen_gmm(n: int, mu, q: float = 0.5, seed=None) -> Dataset:
    """Labels ``+1`` w.p. ``q`` else ``-1``; ``x ~ N(y mu, I_d)``."""
    n = _check_n(n)
    mu = _vector(mu, "mu")
    if not 0.0 < q < 1.0:
        raise ValidationError(f"q must lie in (0, 1), got {q}")
    rng = _rng(seed)
    y = np.where(rng.random(n) < q, 1.0, -1.0)
    X = y[:, None] * mu + rng.standard_normal((n, mu.size))
    return Dataset(X, y)


def sample_subsets(n: int, d: int, m: int, seed=None) -> np.ndarray:
    """``n`` rows of ``{0,1}^d`` with exactly ``m`` ones, uniform over all subsets.

    Vectorised partial Fisher-Yates: ``m`` swap steps per row.
    """
    n = _check_n(n)
    if not 0 < m < d:
        raise ValidationError(f"need 0 < m < d, got m={m}, d={d}")
    rng = _rng(seed)
    idx = np.tile(np.arange(d), (n, 1))
    rows = np.arange(n)
    for k in range(m):
        r = rng.integers(k, d, size=n)
        picked = idx[rows, r]
        idx[rows, r] = idx[:, k]
        idx[:, k] = picked
    X = np.zeros((n, d))
    X[rows[:, None], idx[:, :m]] = 1.0
    return X


def gen_subset_binary(n: int, d: int, m: int, w, sigma: float = 1.0, seed=None) -> Dataset:
    """Uniform fixed-weight binary rows with ``y = x'w + N(0, sigma^2)``.

    A synthetic stand-in for datamodel margins: coordinates sharing a weight
    in ``w`` form true-null pairs.
    """
    w = _vector(w, "w")
    if w.size != d:
        raise ValidationError(f"w has length {w.size}, expected d={d}")
    if not sigma > 0:
        raise ValidationError(f"sigma must be > 0, got {sigma}")
    rng = _rng(seed)
    X = sample_subsets(n, d, m, rng)
    y = X @ w + sigma * rng.standard_normal(n)
    return Dataset(X, y)


def draw_theta_hat(center, scale: float, seed=None) -> np.ndarray:
    """One model estimate ``theta_hat ~ N(center, scale^2 I)``."""
    center = np.asarray(center, dtype=np.float64)
    return center + scale * _rng(seed).standard_normal(center.shape)


@dataclass(frozen=True)
class GeneratorSpec:
    """A generator kind plus its parameters.

    ``params`` per kind: linear ``theta_star, sigma``; quadratic-null ``d``
    (or the matrix ``S``, which must be ``ones + I``); gmm ``mu, q``;
    subset-binary ``d, m, w, sigma``.
    """

    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValidationError(f"unknown generator {self.kind!r}; choose from {GENERATOR_KINDS}")
        p = self.params
        if self.kind == LINEAR:
            _vector(p.get("theta_star"), "theta_star")
            if not p.get("sigma", 1.0) > 0:
                raise ValidationError("sigma must be > 0")
        elif self.kind == QUADRATIC_NULL:
            if "S" in p:
                S = np.asarray(p["S"], dtype=np.float64)
                if S.ndim != 2 or not np.array_equal(S, S.T):
                    raise ValidationError("S must be a symmetric matrix")
                if not np.array_equal(S, quadratic_matrix(S.shape[0])):
                    raise ValidationError("only S = ones + identity is supported")
            elif int(p.get("d", 0)) < 2:
                raise ValidationError("quadratic-null needs d >= 2")
        elif self.kind == GMM:
            _vector(p.get("mu"), "mu")
            if not 0 < p.get("q", 0.5) < 1:
                raise ValidationError("q must lie in (0, 1)")
        else:
            d, m = int(p.get("d", 0)), int(p.get("m", 0))
            if not 0 < m < d:
                raise ValidationError("subset-binary needs 0 < m < d")
            if len(p.get("w", ())) != d:
                raise ValidationError("w must have length d")

    def generate(self, n: int, seed=None) -> Dataset:
        seed = self.seed if seed is None else seed
        p = self.params
        if self.kind == LINEAR:
            return gen_linear(n, p["theta_star"], p.get("sigma", 1.0), seed)
        if self.kind == QUADRATIC_NULL:
            d = int(p["d"]) if "d" in p else len(p["S"])
            return gen_quadratic_null(n, d, seed)
        if self.kind == GMM:
            return gen_gmm(n, p["mu"], p.get("q", 0.5), seed)
        return gen_subset_binary(n, int(p["d"]), int(p["m"]), p["w"], p.get("sigma", 1.0), seed)


# ---------------------------------------------------------------- samplers


def linear_sampler(theta_star, sigma: float = 1.0):
    """``sampler(n, rng)`` for :func:`swaptest.power.odc_monte_carlo`."""
    return lambda n, rng: gen_linear(n, theta_star, sigma, rng)


def gmm_sampler(mu, q: float = 0.5):
    return lambda n, rng: gen_gmm(n, mu, q, rng)


def swapped_sampler(sampler, pair):
    """Wrap a sampler so its feature rows come out with ``pair`` exchanged."""
    pair = as_pair(pair)

    def draw(n, rng):
        data = sampler(n, rng)
        return swap_coordinates(data.features, pair.i, pair.j), data.responses

    return draw
