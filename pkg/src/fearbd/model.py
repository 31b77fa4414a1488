"""Pointwise kinetics: fear factor, Beddington-DeAngelis response, reaction terms.

All functions accept scalars or numpy arrays and broadcast.  Negative
densities are rejected, never clamped: keeping the state nonnegative is the
solver's responsibility.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the admissible (nonnegative) domain."""


PARAM_NAMES = ("r", "d", "a", "c", "m", "p", "q", "k", "d1", "d2")


@dataclass(frozen=True)
class ModelParams:
    """The ten positive model constants.

    r, d, a: prey birth, natural death and intra-species death rates.
    c, m: conversion rate and predator death rate.
    p, q: capture rate and handling/saturation coefficient.
    k: fear parameter.  d1, d2: prey and predator diffusivities.
    """

    r: float
    d: float
    a: float
    c: float
    m: float
    p: float
    q: float
    k: float
    d1: float
    d2: float

    def __post_init__(self):
        for f in fields(self):
            value = float(getattr(self, f.name))
            if not np.isfinite(value) or value <= 0:
                raise DomainError(f"parameter {f.name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, f.name, value)

    @property
    def chi(self) -> float:
        """Carrying level (r - d)/a of the prey without predators (may be <= 0)."""
        return (self.r - self.d) / self.a

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class ReactionRates:
    A: np.ndarray | float
    B: np.ndarray | float


@dataclass(frozen=True)
class JacobianEntries:
    """Reaction Jacobian written as [[M, -N], [P, -Q]]."""

    M: float
    N: float
    P: float
    Q: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.M, -self.N], [self.P, -self.Q]])

    def as_dict(self) -> dict[str, float]:
        return {"M": float(self.M), "N": float(self.N), "P": float(self.P), "Q": float(self.Q)}


def _check_nonneg(**values):
    for name, value in values.items():
        arr = np.asarray(value, dtype=float)
        if not np.all(arr >= 0):  # also catches NaN
            raise DomainError(f"{name} must be nonnegative")


def fear_factor(k, v):
    """Cost of anti-predator behaviour, 1/(1 + k v)."""
    _check_nonneg(k=k, v=v)
    return 1.0 / (1.0 + k * v)


def functional_response(params: ModelParams, u, v):
    """Per-predator capture rate p/(1 + q u + v)."""
    _check_nonneg(u=u, v=v)
    return params.p / (1.0 + params.q * u + v)


def reaction(params: ModelParams, u, v) -> ReactionRates:
    _check_nonneg(u=u, v=v)
    return ReactionRates(*reaction_unchecked(params, u, v))


def reaction_unchecked(params: ModelParams, u, v):
    # hot path for the solver; callers guarantee u, v >= 0
    r, d, a, c, m, p, q, k = (params.r, params.d, params.a, params.c,
                              params.m, params.p, params.q, params.k)
    capture = p * u * v / (1.0 + q * u + v)
    A = r * u / (1.0 + k * v) - d * u - a * u * u - capture
    B = c * capture - m * v
    return A, B


def jacobian_at(params: ModelParams, u, v) -> JacobianEntries:
    """Analytic Jacobian entries of the reaction terms at (u, v)."""
    _check_nonneg(u=u, v=v)
    r, d, a, c, m, p, q, k = (params.r, params.d, params.a, params.c,
                              params.m, params.p, params.q, params.k)
    D = 1.0 + q * u + v
    D2 = D * D
    M = u * (-2.0 * a + p * q * v / D2) + r / (1.0 + k * v) - d - p * v / D
    N = r * k * u / (1.0 + k * v) ** 2 + p * u * (1.0 + q * u) / D2
    P = c * p * (1.0 + v) * v / D2
    Q = m - c * p * (1.0 + q * u) * u / D2
    return JacobianEntries(M, N, P, Q)
