"""Constant steady states: trivial, semi-trivial and the unique coexistence state.

Substituting the predator nullcline u = lam*(v + 1) into the prey equation and
clearing denominators gives the cubic

    F(v) = alpha1 v^3 - alpha2 v^2 - alpha3 v - alpha4,

with F(v) = -(1 + k v)(1 + v) * G(lam (1 + v), v), G being the per-capita prey
growth.  Its coefficient sequence has exactly one sign change whenever
cp > mq and r > d + a*lam, so the positive root is unique.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from fearbd.model import ModelParams, reaction


class HypothesisError(ValueError):
    """A strict inequality required for coexistence does not hold."""


class NoCoexistenceStructure(HypothesisError):
    """cp <= mq: the predator nullcline never meets the positive quadrant."""


class BracketError(RuntimeError):
    pass


@dataclass(frozen=True)
class CubicCoeffs:
    lam: float
    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float

    def __call__(self, v):
        return ((self.alpha1 * v - self.alpha2) * v - self.alpha3) * v - self.alpha4

    def derivative(self, v):
        return (3.0 * self.alpha1 * v - 2.0 * self.alpha2) * v - self.alpha3

    def standard_form(self) -> tuple[float, float, float, float]:
        """Coefficients of v^3, v^2, v, 1."""
        return (self.alpha1, -self.alpha2, -self.alpha3, -self.alpha4)


@dataclass(frozen=True)
class Equilibrium:
    kind: str  # "trivial" | "semi-trivial" | "coexistence"
    u_star: float
    v_star: float
    residual: float


def _lambda(params: ModelParams) -> float:
    denom = params.c * params.p - params.m * params.q
    if denom <= 0:
        raise NoCoexistenceStructure(
            f"cp > mq violated: cp = {params.c * params.p:.6g}, mq = {params.m * params.q:.6g}")
    return params.m / denom


def cubic_coeffs(params: ModelParams) -> CubicCoeffs:
    r, d, a, p, q, k = params.r, params.d, params.a, params.p, params.q, params.k
    lam = _lambda(params)
    alpha1 = a * lam * k
    alpha2 = -p * k / (1.0 + q * lam) - (a * lam * (1.0 + 2.0 * k) + k * d)
    # the -a*lam term comes from expanding (d + a lam (1 + v))(1 + k v)(1 + v)
    alpha3 = r - p / (1.0 + q * lam) - (a * lam + d) * (1.0 + k) - a * lam
    alpha4 = r - (d + a * lam)
    return CubicCoeffs(lam, alpha1, alpha2, alpha3, alpha4)


def check_coexistence_hypotheses(params: ModelParams) -> float:
    """Return lam, or raise naming the failed inequality."""
    lam = _lambda(params)
    if not params.r > params.d + params.a * lam:
        raise HypothesisError(
            f"r > d + a*lam violated: r = {params.r:.6g}, d + a*lam = {params.d + params.a * lam:.6g}")
    return lam


def _residual(params: ModelParams, u: float, v: float) -> float:
    rates = reaction(params, u, v)
    return max(abs(float(rates.A)), abs(float(rates.B)))


def solve_coexistence(params: ModelParams, tol: float = 1e-12) -> Equilibrium:
    """Unique positive constant equilibrium (u~, v~) with u~ = lam (v~ + 1).

    The root of the cubic is bracketed on [0, v_hi] (v_hi doubled from 1),
    bisected to relative width ``tol`` and then polished by Newton.
    """
    check_coexistence_hypotheses(params)
    F = cubic_coeffs(params)
    lo, hi = 0.0, 1.0
    while F(hi) <= 0:
        hi *= 2.0
        if hi > 1e300:
            raise BracketError("could not bracket the positive root")
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if F(mid) > 0:
            hi = mid
        else:
            lo = mid
    v = 0.5 * (lo + hi)
    best, best_abs = v, abs(F(v))
    for _ in range(20):
        dF = F.derivative(v)
        if dF == 0:
            break
        v_new = v - F(v) / dF
        if not lo - tol * hi <= v_new <= hi + tol * hi:
            break
        f_new = abs(F(v_new))
        if f_new < best_abs:
            best, best_abs = v_new, f_new
        if abs(v_new - v) <= 1e-16 * v_new:
            break
        v = v_new
    v = best
    u = F.lam * (v + 1.0)
    return Equilibrium("coexistence", u, v, _residual(params, u, v))


def constant_equilibria(params: ModelParams) -> list[Equilibrium]:
    out = [Equilibrium("trivial", 0.0, 0.0, 0.0)]
    if params.r > params.d:
        chi = params.chi
        out.append(Equilibrium("semi-trivial", chi, 0.0, _residual(params, chi, 0.0)))
    try:
        out.append(solve_coexistence(params))
    except HypothesisError:
        pass
    return out


def descartes_sign_changes(coeffs) -> int:
    signs = [math.copysign(1.0, c) for c in coeffs if c != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)
