"""Linear stability of the coexistence state under Neumann diffusion.

For a Laplacian eigenvalue mu the linearised operator restricted to that mode is

    A(mu) = mu I - diag(1/d1, 1/d2) J,        J = [[M, -N], [P, -Q]],

and d1 d2 det A(mu) = H(mu) = d1 d2 mu^2 + (Q d1 - M d2) mu + PN - MQ.
Modes with H(mu_i) < 0 are unstable; their count gamma decides the index
parity used by the degree-theoretic existence argument.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from fearbd.equilibria import Equilibrium, check_coexistence_hypotheses, solve_coexistence
from fearbd.model import JacobianEntries, ModelParams, jacobian_at

TIE_RTOL = 1e-12


@dataclass(frozen=True)
class Spectrum:
    """Neumann eigenvalues (i pi / L)^2 of -Laplacian on (0, L), multiplicity 1."""

    L: float
    modes: tuple[tuple[int, float, int], ...]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([mu for _, mu, _ in self.modes])


def spectrum(L: float, n_modes: int) -> Spectrum:
    if L <= 0 or n_modes < 1:
        raise ValueError("need L > 0 and n_modes >= 1")
    return Spectrum(L, tuple((i, (i * math.pi / L) ** 2, 1) for i in range(n_modes + 1)))


def poincare_constant(L: float) -> float:
    """Poincare-Wirtinger constant on (0, L): inverse first nonzero eigenvalue."""
    return (L / math.pi) ** 2


def _coexistence_entries(params: ModelParams, equilibrium: Equilibrium) -> JacobianEntries:
    if equilibrium.kind != "coexistence":
        raise ValueError(f"dispersion analysis needs the coexistence state, got {equilibrium.kind}")
    return jacobian_at(params, equilibrium.u_star, equilibrium.v_star)


def _H(e: JacobianEntries, d1: float, d2: float, mu):
    return d1 * d2 * mu * mu + (e.Q * d1 - e.M * d2) * mu + e.P * e.N - e.M * e.Q


def dispersion_H(params: ModelParams, equilibrium: Equilibrium, mu):
    e = _coexistence_entries(params, equilibrium)
    return _H(e, params.d1, params.d2, mu)


def mode_matrix(params: ModelParams, equilibrium: Equilibrium, mu: float) -> np.ndarray:
    e = _coexistence_entries(params, equilibrium)
    d1, d2 = params.d1, params.d2
    return np.array([[mu - e.M / d1, e.N / d1], [-e.P / d2, mu + e.Q / d2]])


def _window(e: JacobianEntries, d1: float, d2: float):
    B = e.M * d2 - e.Q * d1
    disc = B * B - 4.0 * d1 * d2 * (e.P * e.N - e.M * e.Q)
    if B <= 0 or disc <= 0:
        return None
    root = math.sqrt(disc)
    mu_plus = (B + root) / (2.0 * d1 * d2)
    # product of roots is (PN - MQ)/(d1 d2); avoids cancellation in B - root
    mu_minus = (e.P * e.N - e.M * e.Q) / (d1 * d2 * mu_plus)
    return mu_minus, mu_plus


def mode_window(params: ModelParams, equilibrium: Equilibrium):
    """(mu_minus, mu_plus) where H < 0, or None when H has no such real window.

    Requires M d2 - Q d1 > 0 and a positive discriminant.  mu_minus is
    negative only if the kinetics are already unstable (PN - MQ < 0).
    """
    return _window(_coexistence_entries(params, equilibrium), params.d1, params.d2)


@dataclass(frozen=True)
class DispersionReport:
    entries: JacobianEntries
    equilibrium: Equilibrium
    condition_4_13_holds: bool
    mu_minus: float | None
    mu_plus: float | None
    unstable_modes: tuple[tuple[int, float], ...]
    gamma: int
    m_over_d1: float
    bracket_index: int | None  # j with M/d1 in (mu_j, mu_{j+1}), j >= 1
    pattern_predicted: bool
    some_mode_unstable: bool
    spectrum: Spectrum = field(repr=False)

    def as_dict(self) -> dict:
        return {
            "equilibrium": {"u": self.equilibrium.u_star, "v": self.equilibrium.v_star},
            "entries": self.entries.as_dict(),
            "condition_4_13_holds": self.condition_4_13_holds,
            "mu_minus": self.mu_minus,
            "mu_plus": self.mu_plus,
            "unstable_modes": [mu for _, mu in self.unstable_modes],
            "unstable_mode_indices": [i for i, _ in self.unstable_modes],
            "gamma": self.gamma,
            "M_over_d1": self.m_over_d1,
            "bracket_index": self.bracket_index,
            "pattern_predicted": self.pattern_predicted,
            "some_mode_unstable": self.some_mode_unstable,
        }


def _strictly_inside(x: float, lo: float, hi: float) -> bool:
    tol_lo = TIE_RTOL * max(abs(lo), abs(x), 1e-300)
    tol_hi = TIE_RTOL * max(abs(hi), abs(x), 1e-300)
    return lo + tol_lo < x < hi - tol_hi


def analyze(params: ModelParams, L: float = math.pi, n_modes: int = 20) -> DispersionReport:
    eq = solve_coexistence(params)
    e = jacobian_at(params, eq.u_star, eq.v_star)
    spec = spectrum(L, n_modes)
    window = _window(e, params.d1, params.d2)
    unstable = []
    if window is not None:
        lo, hi = window
        unstable = [(i, mu) for i, mu, _ in spec.modes if _strictly_inside(mu, lo, hi)]
    gamma = sum(1 for _ in unstable)
    m_over_d1 = e.M / params.d1
    mus = spec.eigenvalues
    bracket = None
    for j in range(1, len(mus) - 1):
        if _strictly_inside(m_over_d1, mus[j], mus[j + 1]):
            bracket = j
            break
    some_unstable = bool(np.any(_H(e, params.d1, params.d2, mus[1:]) < 0))
    predicted = (e.M > 0 and window is not None and gamma % 2 == 1 and bracket is not None)
    return DispersionReport(
        entries=e,
        equilibrium=eq,
        condition_4_13_holds=window is not None,
        mu_minus=None if window is None else window[0],
        mu_plus=None if window is None else window[1],
        unstable_modes=tuple(unstable),
        gamma=gamma,
        m_over_d1=m_over_d1,
        bracket_index=bracket,
        pattern_predicted=bool(predicted),
        some_mode_unstable=some_unstable,
        spectrum=spec,
    )


@dataclass(frozen=True)
class NonexistenceReport:
    """Explicit diffusion threshold above which no nonconstant steady state exists.

    mu_lower stands in for the uniform lower bound of u, which depends on a
    non-constructive Harnack constant; the default m/(10 c p) is a heuristic.
    """

    chi: float
    mu_lower: float
    C1: float
    C2: float
    C3: float
    C4: float
    poincare_const: float
    d_star: float
    mu_lower_heuristic: bool = True

    def as_dict(self) -> dict:
        return {
            "chi": self.chi, "mu_lower": self.mu_lower, "C1": self.C1, "C2": self.C2,
            "C3": self.C3, "C4": self.C4, "poincare_const": self.poincare_const,
            "d_star": self.d_star, "mu_lower_heuristic": self.mu_lower_heuristic,
        }


def default_mu_lower(params: ModelParams, harnack_const: float = 10.0) -> float:
    return params.m / (harnack_const * params.c * params.p)


def nonexistence_threshold(params: ModelParams, mu_lower: float | None = None,
                           C_p: float = 1.0) -> NonexistenceReport:
    r, d, a, c, m, p, q, k = (params.r, params.d, params.a, params.c,
                              params.m, params.p, params.q, params.k)
    if r <= d:
        raise ValueError("no positive chi: need r > d")
    heuristic = mu_lower is None
    if mu_lower is None:
        mu_lower = default_mu_lower(params)
    if not 0 < mu_lower < m / (c * p):
        raise ValueError(f"mu_lower must lie in (0, m/(cp)) = (0, {m / (c * p):.6g})")
    if C_p <= 0:
        raise ValueError("C_p must be positive")
    chi = (r - d) / a
    v_bound = c * (r + m) * chi / m
    C2 = (r * k + p * (1.0 + q * chi)) / 2.0
    C1 = C2 + c * p * q * (r + m) * chi / m - a
    C3 = c * c * p * (r + m) * chi / (2.0 * m) * (1.0 + v_bound)
    C4 = c * p * (chi * (1.0 + q * chi) + v_bound / 2.0) * (1.0 + v_bound)
    f1, f2, f3, f4 = (max(x, 0.0) for x in (C1, C2, C3, C4))
    d_star = max(chi * chi * C_p * (f1 + f3) / mu_lower, C_p * (f2 + f4))
    return NonexistenceReport(chi, mu_lower, C1, C2, C3, C4, C_p, d_star, heuristic)


def report_json(disp: DispersionReport | None, nonex: NonexistenceReport | None, **extra) -> str:
    doc = dict(extra)
    if disp is not None:
        doc.update(disp.as_dict())
    doc["d_star"] = None if nonex is None else nonex.d_star
    if nonex is not None:
        doc["nonexistence"] = nonex.as_dict()
    return json.dumps(doc, indent=2, sort_keys=True)


def report_text(disp: DispersionReport | None, nonex: NonexistenceReport | None) -> str:
    lines = []
    if disp is not None:
        e = disp.entries
        lines.append(f"coexistence state     u~ = {disp.equilibrium.u_star:.6f}  v~ = {disp.equilibrium.v_star:.6f}")
        lines.append(f"entries               M = {e.M:.6g}  N = {e.N:.6g}  P = {e.P:.6g}  Q = {e.Q:.6g}")
        lines.append(f"M/d1                  {disp.m_over_d1:.6g}"
                     + ("" if disp.bracket_index is None
                        else f"  in (mu_{disp.bracket_index}, mu_{disp.bracket_index + 1})"))
        if disp.condition_4_13_holds:
            lines.append(f"unstable window       ({disp.mu_minus:.6g}, {disp.mu_plus:.6g})")
        else:
            lines.append("unstable window       none")
        lines.append("unstable modes        " + (", ".join(f"mu_{i}={mu:g}" for i, mu in disp.unstable_modes) or "none"))
        lines.append(f"gamma                 {disp.gamma} ({'odd' if disp.gamma % 2 else 'even'})")
        lines.append(f"pattern predicted     {disp.pattern_predicted}")
        lines.append(f"some H(mu_i) < 0      {disp.some_mode_unstable}")
    if nonex is not None:
        lines.append(f"chi                   {nonex.chi:.6g}")
        lines.append(f"mu_lower              {nonex.mu_lower:.6g}" + ("  (heuristic default)" if nonex.mu_lower_heuristic else ""))
        lines.append(f"C1..C4                {nonex.C1:.6g}  {nonex.C2:.6g}  {nonex.C3:.6g}  {nonex.C4:.6g}")
        lines.append(f"d*                    {nonex.d_star:.6g}  (C_p = {nonex.poincare_const:g})")
    return "\n".join(lines)


__all__ = [
    "Spectrum", "spectrum", "poincare_constant", "dispersion_H", "mode_matrix", "mode_window",
    "DispersionReport", "analyze", "NonexistenceReport", "nonexistence_threshold",
    "default_mu_lower", "report_json", "report_text", "check_coexistence_hypotheses",
]
