import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fearbd.equilibria import (
    HypothesisError,
    NoCoexistenceStructure,
    check_coexistence_hypotheses,
    constant_equilibria,
    cubic_coeffs,
    descartes_sign_changes,
    solve_coexistence,
)
from fearbd.model import ModelParams, reaction

from conftest import coexistence_params, make_params


def prey_growth(params, u, v):
    return reaction(params, u, v).A / u


@settings(max_examples=100, deadline=None)
@given(coexistence_params, st.floats(0.0, 50.0))
def test_cubic_is_cleared_prey_nullcline(p, v):
    F = cubic_coeffs(p)
    u = F.lam * (1 + v)
    expected = -(1 + p.k * v) * (1 + v) * prey_growth(p, u, v)
    assert F(v) == pytest.approx(expected, rel=1e-9, abs=1e-12 * max(1.0, abs(F.alpha1) * v ** 3))


@settings(max_examples=100, deadline=None)
@given(coexistence_params)
def test_one_sign_change_in_standard_form(p):
    assert descartes_sign_changes(cubic_coeffs(p).standard_form()) == 1


@settings(max_examples=100, deadline=None)
@given(coexistence_params)
def test_coexistence_state_is_a_zero_of_the_kinetics(p):
    eq = solve_coexistence(p)
    lam = check_coexistence_hypotheses(p)
    assert eq.kind == "coexistence"
    assert eq.u_star == pytest.approx(lam * (1 + eq.v_star), rel=1e-14)
    assert eq.u_star > 0 and eq.v_star > 0
    assert eq.residual < 1e-10 * max(1.0, eq.u_star * eq.v_star * p.p)


def test_known_case_without_fear():
    # k = 0 makes the cubic a quadratic with a closed-form root
    p = make_params(q=0.5, k=1e-12, a=0.2, d=0.1, m=0.4, p=1.0, lam=0.5, excess=1.0)
    F = cubic_coeffs(p)
    a2, a3, a4 = -F.alpha2, -F.alpha3, -F.alpha4
    root = (-a3 + np.sqrt(a3 * a3 - 4 * a2 * a4)) / (2 * a2)
    assert solve_coexistence(p).v_star == pytest.approx(root, rel=1e-9)


def test_structure_failure_is_reported():
    p = ModelParams(r=1, d=0.1, a=0.1, c=0.1, m=1.0, p=1.0, q=1.0, k=0.1, d1=1, d2=1)
    with pytest.raises(NoCoexistenceStructure, match="cp > mq"):
        solve_coexistence(p)


def test_growth_failure_is_reported():
    p = make_params(q=1, k=1, a=1, d=0.5, m=0.5, p=1, lam=0.5, excess=0.5)
    p = p.replace(r=p.d + p.a * 0.5 * 0.99)
    with pytest.raises(HypothesisError, match="r > d"):
        check_coexistence_hypotheses(p)


def test_constant_equilibria_lists_all_states():
    p = make_params(q=1, k=1, a=0.5, d=0.2, m=0.3, p=1, lam=0.3, excess=2.0)
    kinds = [e.kind for e in constant_equilibria(p)]
    assert kinds == ["trivial", "semi-trivial", "coexistence"]
    semi = constant_equilibria(p)[1]
    assert semi.u_star == pytest.approx(p.chi) and semi.residual < 1e-14
    low = p.replace(r=0.5 * p.d)
    assert [e.kind for e in constant_equilibria(low)] == ["trivial"]


@settings(max_examples=100, deadline=None)
@given(coexistence_params)
def test_brute_force_scan_finds_single_positive_root(p):
    F = cubic_coeffs(p)
    v_star = solve_coexistence(p).v_star
    grid = np.concatenate([np.linspace(0, 10 * v_star + 10, 20001), [1e3 * (v_star + 1)]])
    vals = F(grid)
    changes = np.count_nonzero(np.sign(vals[1:]) != np.sign(vals[:-1]))
    assert changes == 1
    assert vals[0] < 0


def test_descartes_counts():
    assert descartes_sign_changes([1, 2, 3]) == 0
    assert descartes_sign_changes([1, -2, 0, 3]) == 2
