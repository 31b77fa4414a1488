import math

import numpy as np
import pytest
from hypothesis import strategies as st

from fearbd import Field, Grid1D, ModelParams, SolverConfig, integrate, solve_coexistence
from fearbd.config import load_config
from fearbd.cli import CONFIG_DIR

ACCEPTANCE_LINES: list[str] = []


def make_params(q, k, a, d, m, p, lam, excess, d1=0.01, d2=0.1):
    """Hypothesis-satisfying parameters built from lam = m/(cp - mq) and r - d - a lam > 0."""
    c = m * (1.0 / lam + q) / p
    r = d + a * lam * (1.0 + excess)
    return ModelParams(r=r, d=d, a=a, c=c, m=m, p=p, q=q, k=k, d1=d1, d2=d2)


def random_params(rng: np.random.Generator, **over) -> ModelParams:
    def lu(lo, hi):
        return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))

    kw = dict(q=lu(0.01, 10), k=lu(0.01, 10), a=lu(0.01, 1), d=lu(0.01, 1), m=lu(0.05, 1),
              p=lu(0.1, 5), lam=lu(0.05, 2), excess=lu(0.1, 10), d1=lu(0.01, 1), d2=lu(0.01, 1))
    kw.update(over)
    return make_params(**kw)


def _log_floats(lo, hi):
    return st.floats(math.log(lo), math.log(hi)).map(math.exp)


coexistence_params = st.builds(
    make_params,
    q=_log_floats(0.01, 10), k=_log_floats(0.01, 10), a=_log_floats(0.01, 1),
    d=_log_floats(0.01, 1), m=_log_floats(0.05, 1), p=_log_floats(0.1, 5),
    lam=_log_floats(0.05, 2), excess=_log_floats(0.1, 10),
    d1=_log_floats(0.01, 1), d2=_log_floats(0.01, 1),
)

# large handling coefficient and weak crowding make the prey entry M positive
turing_prone_params = st.builds(
    make_params,
    q=_log_floats(5, 200), k=_log_floats(0.001, 0.1), a=_log_floats(0.001, 0.1),
    d=_log_floats(0.01, 1), m=_log_floats(0.05, 1), p=_log_floats(0.1, 5),
    lam=_log_floats(0.01, 0.2), excess=_log_floats(0.1, 10),
    d1=_log_floats(0.01, 1), d2=_log_floats(0.01, 1),
)


def with_wide_window(params, spread):
    """Raise d2 until H has a real negative window (needs M > 0); spread > 1."""
    from fearbd.model import jacobian_at
    eq = solve_coexistence(params)
    e = jacobian_at(params, eq.u_star, eq.v_star)
    det = e.P * e.N - e.M * e.Q
    rho = spread * (e.Q / e.M + 4 * max(det, 0.0) / e.M ** 2 + 1.0)
    return params.replace(d2=params.d1 * rho), e


def fig_config(name):
    return load_config(CONFIG_DIR / name)


def scenario_field(params, grid):
    eq = solve_coexistence(params)
    return Field(eq.u_star + 0.01 * np.cos(grid.x / 2), eq.v_star + 0.01 * np.cos(grid.x))


@pytest.fixture(scope="session")
def fig1_run():
    """Fig-1 scenario at the default resolution, t = 200."""
    cfg = fig_config("fig1.cfg")
    summary, series = integrate(scenario_field(cfg.params, cfg.grid), cfg.params, cfg.grid, cfg.solver)
    return cfg, summary, series


@pytest.fixture(scope="session")
def large_diffusion_run():
    """Fig-1 kinetics with d1 = d2 = 2 d* (default mu_lower, C_p = 1)."""
    from fearbd.turing import nonexistence_threshold
    cfg = fig_config("fig1_large_diffusion.cfg")
    d_star = nonexistence_threshold(cfg.params, C_p=1.0).d_star
    params = cfg.params.replace(d1=2 * d_star, d2=2 * d_star)
    summary, series = integrate(scenario_field(params, cfg.grid), params, cfg.grid, cfg.solver)
    return params, d_star, summary, series


@pytest.fixture(scope="session")
def decay_run():
    from fearbd.config import initial_field
    cfg = fig_config("decay.cfg")
    summary, series = integrate(initial_field(cfg), cfg.params, cfg.grid, cfg.solver)
    return cfg, summary, series


def small_run(params, t_end=50.0, n=64, dt=5e-3):
    grid = Grid1D(n=n)
    eq = solve_coexistence(params)
    f = Field(eq.u_star * (1 + 0.01 * np.cos(grid.x)), eq.v_star * (1 + 0.01 * np.cos(2 * grid.x)))
    cfg = SolverConfig(dt=dt, t_end=t_end, snapshot_stride=100, positivity_mode="halve-dt")
    return grid, *integrate(f, params, grid, cfg)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
