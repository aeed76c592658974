"""Bounds on the feature-law shift caused by swapping two coordinates.

The decision rule needs ``tau_x >= d_TV(L(X), L(X_swap))``. Three sources
are supported: a closed-form Gaussian bound (KL divergence plus Pinsker),
the exact zero for uniform fixed-weight binary designs, and a value the
caller vouches for.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .core import ValidationError, as_pair

GAUSSIAN_KL_PINSKER = "gaussian-kl-pinsker"
UNIFORM_BINARY_EXACT = "uniform-binary-exact"
USER_SUPPLIED = "user-supplied"

PROVENANCES = (GAUSSIAN_KL_PINSKER, UNIFORM_BINARY_EXACT, USER_SUPPLIED)

# rounding slack on the (provably non-negative) KL radicand
RADICAND_TOL = 1e-10


class InternalConsistencyError(ArithmeticError):
    """A quantity that is non-negative in exact arithmetic came out clearly negative."""


@dataclass(frozen=True, eq=False)
class GaussianSpec:
    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=np.float64)
        sigma = np.array(self.sigma, dtype=np.float64)
        if mu.ndim != 1:
            raise ValidationError("mu must be a 1-d vector")
        d = mu.shape[0]
        if sigma.shape != (d, d):
            raise ValidationError(f"sigma must be {d}x{d}, got {sigma.shape}")
        if not (np.isfinite(mu).all() and np.isfinite(sigma).all()):
            raise ValidationError("mu and sigma must be finite")
        if not np.allclose(sigma, sigma.T, rtol=1e-12, atol=1e-12):
            raise ValidationError("sigma must be symmetric")
        mu.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def d(self) -> int:
        return self.mu.shape[0]

    def factor(self):
        """Cholesky factor of ``sigma``; raises ValidationError if not PD."""
        try:
            return linalg.cho_factor(self.sigma, lower=True, check_finite=False)
        except linalg.LinAlgError:
            raise ValidationError("sigma is not positive definite") from None

    @classmethod
    def from_dict(cls, obj) -> "GaussianSpec":
        try:
            return cls(obj["mu"], obj["sigma"])
        except (KeyError, TypeError):
            raise ValidationError('Gaussian spec needs keys "mu" and "sigma"') from None

    @classmethod
    def from_json(cls, source) -> "GaussianSpec":
        """Parse a JSON string or a path to a JSON file."""
        text = str(source)
        if os.path.exists(text):
            with open(text) as fh:
                text = fh.read()
        try:
            obj = json.loads(text)
        except ValueError as exc:
            raise ValidationError(f"invalid Gaussian spec JSON: {exc}") from None
        return cls.from_dict(obj)


@dataclass(frozen=True)
class ShiftBound:
    value: float
    provenance: str
    declaration: str | None = field(default=None)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValidationError(f"unknown provenance {self.provenance!r}")
        v = float(self.value)
        if not (v >= 0 and math.isfinite(v)):
            raise ValidationError(f"shift bound must be finite and >= 0, got {self.value}")
        if self.provenance == UNIFORM_BINARY_EXACT and v != 0.0:
            raise ValidationError("uniform-binary-exact bound is always 0")
        object.__setattr__(self, "value", v)

    @property
    def unattributed(self) -> bool:
        """User-supplied with no stated justification."""
        return self.provenance == USER_SUPPLIED and not (self.declaration or "").strip()

    def __float__(self):
        return self.value

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "provenance": self.provenance,
            "declaration": self.declaration,
            "unattributed": self.unattributed,
        }


def gaussian_swap_bound(spec: GaussianSpec, pair) -> ShiftBound:
    """Pinsker bound on the swap shift of ``N(mu, sigma)``.

    Computes ``1/2 * sqrt(tr(Sigma^-1 (P Sigma P - Sigma)) + dm' Sigma^-1 dm)``
    with ``dm = mu - P mu``. Working with ``P Sigma P - Sigma`` (zero outside
    rows and columns i, j) instead of ``tr(Sigma^-1 P Sigma P) - d`` makes the
    result exactly zero whenever the law is swap-invariant. Only the
    Cholesky factor of ``sigma`` is used; it is never inverted.
    """
    pair = as_pair(pair)
    pair.check(spec.d)
    cf = spec.factor()
    if pair.degenerate:
        return ShiftBound(0.0, GAUSSIAN_KL_PINSKER)
    i, j = pair.i, pair.j
    perm = np.arange(spec.d)
    perm[[i, j]] = [j, i]
    S = spec.sigma
    D = S[np.ix_(perm, perm)] - S
    dm = spec.mu - spec.mu[perm]
    trace_term = float(np.trace(linalg.cho_solve(cf, D, check_finite=False))) if D.any() else 0.0
    quad = float(dm @ linalg.cho_solve(cf, dm, check_finite=False)) if dm.any() else 0.0
    radicand = trace_term + quad
    if radicand < 0:
        if radicand < -RADICAND_TOL:
            raise InternalConsistencyError(
                f"KL radicand {radicand:.3e} is negative beyond rounding; sigma may be ill-conditioned"
            )
        radicand = 0.0
    return ShiftBound(0.5 * math.sqrt(radicand), GAUSSIAN_KL_PINSKER)


def uniform_binary_bound() -> ShiftBound:
    """Exact zero for rows drawn uniformly from ``{x in {0,1}^d : sum(x) = m}``.

    Swapping coordinates maps that set onto itself and preserves the uniform
    mass of every atom. The caller is responsible for the sampling design.
    """
    return ShiftBound(0.0, UNIFORM_BINARY_EXACT)


def exchangeable_zero_bound(declaration: str = "") -> ShiftBound:
    """Record the caller's claim that the swap leaves the feature law unchanged."""
    return ShiftBound(0.0, USER_SUPPLIED, declaration)


def user_bound(value: float, declaration: str = "") -> ShiftBound:
    return ShiftBound(value, USER_SUPPLIED, declaration)
