import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fearbd.completion import figure_params
from fearbd.equilibria import HypothesisError, solve_coexistence
from fearbd.model import jacobian_at
from fearbd.turing import (
    analyze,
    dispersion_H,
    mode_matrix,
    mode_window,
    nonexistence_threshold,
    poincare_constant,
    report_json,
    report_text,
    spectrum,
)

from conftest import coexistence_params, turing_prone_params, with_wide_window


def test_spectrum_on_unit_interval_convention():
    spec = spectrum(math.pi, 5)
    assert np.allclose(spec.eigenvalues, [0, 1, 4, 9, 16, 25])
    assert all(mult == 1 for _, _, mult in spec.modes)
    assert np.allclose(spectrum(2 * math.pi, 2).eigenvalues, [0, 0.25, 1])
    assert poincare_constant(math.pi) == 1.0
    with pytest.raises(ValueError):
        spectrum(0.0, 3)


@settings(max_examples=100, deadline=None)
@given(turing_prone_params, st.floats(1.5, 100))
def test_window_endpoints_are_roots(p, spread):
    _, e0 = with_wide_window(p, 1.0)
    assume(e0.M > 0)
    p, _ = with_wide_window(p, spread)
    eq = solve_coexistence(p)
    window = mode_window(p, eq)
    assert window is not None
    lo, hi = window
    e = jacobian_at(p, eq.u_star, eq.v_star)
    scale = p.d1 * p.d2 * hi * hi + abs(e.Q * p.d1 - e.M * p.d2) * hi + abs(e.P * e.N) + abs(e.M * e.Q)
    for mu in (lo, hi):
        assert abs(dispersion_H(p, eq, mu)) <= 1e-9 * scale
    assert dispersion_H(p, eq, 0.5 * (lo + hi)) < 0


@settings(max_examples=50, deadline=None)
@given(coexistence_params)
def test_mode_matrix_determinant_is_scaled_H(p):
    eq = solve_coexistence(p)
    for mu in (0.0, 1.0, 7.5):
        det = np.linalg.det(mode_matrix(p, eq, mu))
        assert det * p.d1 * p.d2 == pytest.approx(dispersion_H(p, eq, mu), rel=1e-8, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(coexistence_params)
def test_equal_diffusion_cannot_destabilise_stable_kinetics(p):
    eq = solve_coexistence(p)
    e = jacobian_at(p, eq.u_star, eq.v_star)
    assume(e.M < e.Q and e.P * e.N - e.M * e.Q > 0)
    same = p.replace(d2=p.d1)
    assert mode_window(same, eq) is None
    assert not analyze(same).some_mode_unstable


def test_fig1_window_and_parity():
    rep = analyze(figure_params(1))
    assert rep.m_over_d1 == pytest.approx(2.407, abs=1e-3)
    assert rep.mu_minus < 1 < rep.mu_plus < 4
    assert [i for i, _ in rep.unstable_modes] == [1]
    assert rep.gamma == 1 and rep.bracket_index == 1
    assert rep.pattern_predicted and rep.some_mode_unstable


def test_fig2_window_and_parity():
    rep = analyze(figure_params(2))
    assert rep.m_over_d1 == pytest.approx(10.095, abs=1e-3)
    assert 9 < rep.mu_plus < 16
    assert rep.gamma == 3 and rep.bracket_index == 3
    assert rep.pattern_predicted


def test_no_prediction_without_window():
    rep = analyze(figure_params(1).replace(d2=figure_params(1).d1))
    assert not rep.condition_4_13_holds
    assert rep.gamma == 0 and not rep.pattern_predicted
    assert rep.mu_minus is None


def test_endpoint_ties_are_not_counted():
    p = figure_params(1)
    eq = solve_coexistence(p)
    e = jacobian_at(p, eq.u_star, eq.v_star)
    # choose d1 so that H(4) = 0: 16 d1 d2 + 4 (Q d1 - M d2) + det = 0
    det = e.P * e.N - e.M * e.Q
    d1 = (4 * e.M * p.d2 - det) / (16 * p.d2 + 4 * e.Q)
    rep = analyze(p.replace(d1=d1))
    assert min(abs(rep.mu_minus - 4), abs(rep.mu_plus - 4)) < 1e-12
    assert 2 not in [i for i, _ in rep.unstable_modes]


def test_analyze_raises_when_hypotheses_fail():
    p = figure_params(1).replace(m=50.0)
    with pytest.raises(HypothesisError):
        analyze(p)


def test_nonexistence_threshold_formula():
    p = figure_params(1)
    rep = nonexistence_threshold(p)
    chi = (p.r - p.d) / p.a
    B = p.c * (p.r + p.m) * chi / p.m
    assert rep.chi == pytest.approx(chi)
    assert rep.C2 == pytest.approx((p.r * p.k + p.p * (1 + p.q * chi)) / 2)
    assert rep.C4 == pytest.approx(p.c * p.p * (chi * (1 + p.q * chi) + B / 2) * (1 + B))
    assert rep.mu_lower == pytest.approx(p.m / (10 * p.c * p.p))
    assert rep.d_star == pytest.approx(max(chi ** 2 * (rep.C1 + rep.C3) / rep.mu_lower, rep.C2 + rep.C4))
    assert rep.mu_lower_heuristic


def test_nonexistence_threshold_scaling_and_errors():
    p = figure_params(1)
    base = nonexistence_threshold(p)
    assert nonexistence_threshold(p, C_p=4.0).d_star == pytest.approx(4 * base.d_star)
    assert nonexistence_threshold(p, mu_lower=base.mu_lower / 2).d_star >= base.d_star
    assert not nonexistence_threshold(p, mu_lower=base.mu_lower).mu_lower_heuristic
    with pytest.raises(ValueError):
        nonexistence_threshold(p, mu_lower=p.m / (p.c * p.p))
    with pytest.raises(ValueError):
        nonexistence_threshold(p.replace(r=p.d))


def test_reports_serialise():
    p = figure_params(2)
    doc = json.loads(report_json(analyze(p), nonexistence_threshold(p), verdict="coexistence"))
    for key in ("mu_minus", "mu_plus", "unstable_modes", "gamma", "M_over_d1", "pattern_predicted", "d_star"):
        assert key in doc
    assert doc["unstable_modes"] == [1.0, 4.0, 9.0]
    assert "gamma                 3 (odd)" in report_text(analyze(p), None)
