"""Method-of-lines solver on (0, L) with homogeneous Neumann boundaries.

Nodes sit at x_j = j h, j = 0..n-1, h = L/(n-1); the boundary condition is
imposed by mirror ghost nodes.  The default IMEX scheme takes diffusion by
backward Euler (one banded tridiagonal solve per step) and reaction by
forward Euler.  The implicit solve is written for the increment

    (I - dt D Lap) delta = dt (D Lap y + R(y)),     y_new = y + delta,

which keeps the spatial mean exact even when dt D / h^2 is huge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from fearbd.model import ModelParams, reaction_unchecked

DECAY_LEVEL = 1e-3
PATTERN_VAR = 1e-6
CONSTANT_VAR = 1e-10
TAIL_FRACTION = 0.1


class PositivityError(RuntimeError):
    def __init__(self, t: float, message: str = "negative density produced"):
        super().__init__(f"{message} at t = {t:.6g}")
        self.t = t
        self.series = None


class BlowUpError(RuntimeError):
    def __init__(self, t: float, series: "SnapshotSeries | None" = None):
        super().__init__(f"non-finite values at t = {t:.6g}")
        self.t = t
        self.series = series


@dataclass(frozen=True)
class Grid1D:
    L: float = math.pi
    n: int = 256

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("domain length must be positive")
        if self.n < 16:
            raise ValueError("need at least 16 nodes")

    @property
    def h(self) -> float:
        return self.L / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.h

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w


@dataclass(frozen=True)
class Field:
    u: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if u.shape != v.shape or u.ndim != 1:
            raise ValueError("u and v must be 1-D arrays of equal length")
        if not (u.min() >= 0 and v.min() >= 0):
            raise PositivityError(self.t, "field has negative or NaN entries")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)


@dataclass(frozen=True)
class SolverConfig:
    dt: float = 1e-3
    t_end: float = 200.0
    scheme: str = "imex"
    snapshot_stride: int = 1000
    steady_tol: float = 1e-8
    positivity_mode: str = "reject"
    dt_min: float = 1e-9

    def __post_init__(self):
        if not self.dt > 0 or not self.t_end > 0:
            raise ValueError("dt and t_end must be positive")
        if self.scheme not in ("imex", "explicit"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.positivity_mode not in ("reject", "halve-dt"):
            raise ValueError(f"unknown positivity_mode {self.positivity_mode!r}")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")

    def check_explicit(self, grid: Grid1D, params: ModelParams, dt: float | None = None):
        dt = self.dt if dt is None else dt
        limit = grid.h ** 2 / (2.0 * max(params.d1, params.d2))
        if self.scheme == "explicit" and dt > limit:
            raise ValueError(f"explicit scheme needs dt <= h^2/(2 max(d1, d2)) = {limit:.3g}")


def laplacian_neumann(w, grid: Grid1D) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (grid.n,):
        raise ValueError(f"expected length {grid.n}, got {w.shape}")
    out = np.empty_like(w)
    out[1:-1] = w[:-2] - 2.0 * w[1:-1] + w[2:]
    out[0] = 2.0 * (w[1] - w[0])
    out[-1] = 2.0 * (w[-2] - w[-1])
    return out / grid.h ** 2


def _lap_stacked(y: np.ndarray, n: int, inv_h2: float) -> np.ndarray:
    # y holds u then v; same mirror stencil applied to each half
    w = y.reshape(2, n)
    out = np.empty_like(w)
    out[:, 1:-1] = w[:, :-2] - 2.0 * w[:, 1:-1] + w[:, 2:]
    out[:, 0] = 2.0 * (w[:, 1] - w[:, 0])
    out[:, -1] = 2.0 * (w[:, -2] - w[:, -1])
    return out.reshape(-1) * inv_h2


def _banded_backward_euler(n: int, lam_u: float, lam_v: float) -> np.ndarray:
    """Banded form of I - dt diag(d1, d2) Lap for the stacked (u, v) vector."""
    ab = np.zeros((3, 2 * n))
    for off, lam in ((0, lam_u), (n, lam_v)):
        ab[1, off:off + n] = 1.0 + 2.0 * lam
        ab[0, off + 1] = -2.0 * lam
        ab[0, off + 2:off + n] = -lam
        ab[2, off:off + n - 2] = -lam
        ab[2, off + n - 2] = -2.0 * lam
    return ab


class _Stepper:
    def __init__(self, params: ModelParams, grid: Grid1D, config: SolverConfig, reaction=None):
        self.params, self.grid, self.config = params, grid, config
        self.n = grid.n
        self.inv_h2 = 1.0 / grid.h ** 2
        self.diff = np.repeat([params.d1, params.d2], self.n)
        self.weights = grid.trapezoid_weights()
        self.length = float(self.weights.sum())
        self.reaction = reaction or (lambda u, v: reaction_unchecked(params, u, v))
        self._banded: dict[float, np.ndarray] = {}

    def _matrix(self, dt: float) -> np.ndarray:
        ab = self._banded.get(dt)
        if ab is None:
            ab = _banded_backward_euler(self.n, dt * self.params.d1 * self.inv_h2,
                                        dt * self.params.d2 * self.inv_h2)
            self._banded[dt] = ab
        return ab

    def raw(self, y: np.ndarray, dt: float) -> np.ndarray:
        n = self.n
        A, B = self.reaction(y[:n], y[n:])
        rhs = self.diff * _lap_stacked(y, n, self.inv_h2)
        rhs[:n] += A
        rhs[n:] += B
        if self.config.scheme == "explicit":
            return y + dt * rhs
        delta = solve_banded((1, 1), self._matrix(dt), dt * rhs,
                             overwrite_b=True, check_finite=False).reshape(2, n)
        # w^T Lap = 0, so the exact increment has trapezoid mass dt * int R;
        # enforcing it removes the rounding drift of the ill-conditioned solve
        w = self.weights
        target = dt * np.array([A @ w, B @ w])
        delta += ((target - delta @ w) / self.length)[:, None]
        return y + delta.reshape(-1)

    def advance(self, y: np.ndarray, dt: float, t: float) -> np.ndarray:
        y_new = self.raw(y, dt)
        if not math.isfinite(y_new.sum()):
            raise BlowUpError(t + dt)
        if y_new.min() >= 0:
            return y_new
        if self.config.positivity_mode == "reject":
            raise PositivityError(t + dt)
        half = dt / 2.0
        if half < self.config.dt_min:
            raise PositivityError(t + dt, "negative density persists below dt_min")
        self.config.check_explicit(self.grid, self.params, half)
        y_mid = self.advance(y, half, t)
        return self.advance(y_mid, half, t + half)


def step(field: Field, params: ModelParams, grid: Grid1D, config: SolverConfig,
         reaction=None) -> Field:
    """Advance one step of size config.dt (halving internally if configured)."""
    if field.u.shape != (grid.n,):
        raise ValueError("field does not match grid")
    config.check_explicit(grid, params)
    stepper = _Stepper(params, grid, config, reaction)
    y = stepper.advance(np.concatenate([field.u, field.v]), config.dt, field.t)
    return Field(y[:grid.n], y[grid.n:], field.t + config.dt)


@dataclass
class SnapshotSeries:
    x: np.ndarray
    t: np.ndarray
    u: np.ndarray  # (snapshots, nodes)
    v: np.ndarray
    weights: np.ndarray = field(repr=False)

    @classmethod
    def from_lists(cls, grid: Grid1D, ts, us, vs) -> "SnapshotSeries":
        return cls(grid.x, np.array(ts), np.array(us), np.array(vs), grid.trapezoid_weights())

    @property
    def length(self) -> float:
        return float(self.weights.sum())

    @property
    def max_u(self) -> np.ndarray:
        return self.u.max(axis=1)

    @property
    def max_v(self) -> np.ndarray:
        return self.v.max(axis=1)

    @property
    def u_mass(self) -> np.ndarray:
        return self.u @ self.weights

    @property
    def v_mass(self) -> np.ndarray:
        return self.v @ self.weights

    def _var(self, w: np.ndarray) -> np.ndarray:
        mean = (w @ self.weights) / self.length
        return ((w - mean[:, None]) ** 2) @ self.weights / self.length

    @property
    def var_u(self) -> np.ndarray:
        return self._var(self.u)

    @property
    def var_v(self) -> np.ndarray:
        return self._var(self.v)

    def monitors(self) -> dict[str, list[float]]:
        return {
            "t": self.t.tolist(),
            "max_u": self.max_u.tolist(),
            "max_v": self.max_v.tolist(),
            "v_mass": self.v_mass.tolist(),
            "var_u": self.var_u.tolist(),
            "var_v": self.var_v.tolist(),
        }

    def tail_slice(self) -> slice:
        t0, t1 = self.t[0], self.t[-1]
        start = int(np.searchsorted(self.t, t1 - TAIL_FRACTION * (t1 - t0) - 1e-12))
        return slice(min(start, len(self.t) - 2) if len(self.t) > 1 else 0, None)

    def to_csv(self, path) -> None:
        k, n = self.u.shape
        table = np.column_stack([np.repeat(self.t, n), np.tile(self.x, k),
                                 self.u.reshape(-1), self.v.reshape(-1)])
        np.savetxt(path, table, fmt="%.12e", delimiter=",", header="t,x,u,v", comments="")


@dataclass
class RunSummary:
    final: Field
    t_end: float
    max_u_tail: float
    max_v_tail: float
    v_mass_tail: float
    var_u: float
    var_v: float
    v_mass: float
    var_u_rate: float
    mean_rate: float
    classification: str
    steps: int

    def as_dict(self) -> dict:
        return {
            "classification": self.classification,
            "t_end": self.t_end,
            "steps": self.steps,
            "max_u_tail": self.max_u_tail,
            "max_v_tail": self.max_v_tail,
            "v_mass_tail": self.v_mass_tail,
            "spatial_variance_u": self.var_u,
            "spatial_variance_v": self.var_v,
            "v_mass": self.v_mass,
            "var_u_rate": self.var_u_rate,
            "mean_rate": self.mean_rate,
        }


def _rate(values: np.ndarray, t: np.ndarray) -> float:
    if len(t) < 2:
        return math.inf
    return float(np.max(np.abs(np.diff(values) / np.diff(t))))


def classify(series: SnapshotSeries, steady_tol: float = 1e-8) -> tuple[str, dict]:
    tail = series.tail_slice()
    t = series.t[tail]
    var_u, var_v = series.var_u, series.var_v
    means = series.u_mass / series.length, series.v_mass / series.length
    stats = {
        "max_u_tail": float(series.max_u[tail].max()),
        "max_v_tail": float(series.max_v[tail].max()),
        "v_mass_tail": float(series.v_mass[tail].max()),
        "var_u_rate": _rate(var_u[tail], t),
        "mean_rate": max(_rate(means[0][tail], t), _rate(means[1][tail], t)),
    }
    if max(stats["max_u_tail"], stats["max_v_tail"]) < DECAY_LEVEL:
        label = "decayed"
    elif var_u[-1] < CONSTANT_VAR and var_v[-1] < CONSTANT_VAR and stats["mean_rate"] < steady_tol:
        label = "constant-steady"
    elif var_u[-1] > PATTERN_VAR and stats["var_u_rate"] < steady_tol:
        label = "patterned"
    else:
        label = "not-converged"
    return label, stats


def integrate(initial: Field, params: ModelParams, grid: Grid1D, config: SolverConfig,
              reaction=None) -> tuple[RunSummary, SnapshotSeries]:
    """Advance to config.t_end, snapshotting every config.snapshot_stride steps."""
    if initial.u.shape != (grid.n,):
        raise ValueError("initial field does not match grid")
    if not (initial.u.any() or initial.v.any()):
        raise ValueError("initial data must not be identically zero")
    config.check_explicit(grid, params)
    stepper = _Stepper(params, grid, config, reaction)
    n, dt = grid.n, config.dt
    nsteps = int(round(config.t_end / dt))
    y = np.concatenate([initial.u, initial.v])
    t0 = initial.t
    ts, us, vs = [t0], [initial.u.copy()], [initial.v.copy()]
    for i in range(1, nsteps + 1):
        try:
            y = stepper.advance(y, dt, t0 + (i - 1) * dt)
        except (BlowUpError, PositivityError) as exc:
            exc.series = SnapshotSeries.from_lists(grid, ts, us, vs)
            raise
        if i % config.snapshot_stride == 0 or i == nsteps:
            ts.append(t0 + i * dt)
            us.append(y[:n].copy())
            vs.append(y[n:].copy())
    series = SnapshotSeries.from_lists(grid, ts, us, vs)
    label, stats = classify(series, config.steady_tol)
    summary = RunSummary(
        final=Field(y[:n].copy(), y[n:].copy(), ts[-1]),
        t_end=ts[-1],
        var_u=float(series.var_u[-1]),
        var_v=float(series.var_v[-1]),
        v_mass=float(series.v_mass[-1]),
        classification=label,
        steps=nsteps,
        **stats,
    )
    return summary, series


def bound_monitor(summary: RunSummary, params: ModelParams, L: float,
                  rel_slack: float = 1e-2) -> list[tuple[str, bool | None, float]]:
    """Check the long-time a-priori bounds on a finished run (needs r > d).

    Returns (name, satisfied, margin) with margin = bound - observed; the
    predator-maximum bound applies only when d2 >= d1 and is reported as
    (name, None, nan) otherwise.
    """
    if params.r <= params.d:
        raise ValueError("bounds need r > d")
    chi = params.chi
    v_level = params.c * (params.r + params.m) * chi / params.m
    slack = 1.0 + rel_slack
    checks = [
        ("max_u<=chi", chi * slack - summary.max_u_tail),
        ("v_mass<=c(r+m)chi|L|/m", v_level * L * slack - summary.v_mass_tail),
    ]
    out = [(name, margin >= 0, margin) for name, margin in checks]
    if params.d2 >= params.d1:
        margin = v_level * slack - summary.max_v_tail
        out.append(("max_v<=c(r+m)chi/m", margin >= 0, margin))
    else:
        out.append(("max_v<=c(r+m)chi/m", None, math.nan))
    return out
