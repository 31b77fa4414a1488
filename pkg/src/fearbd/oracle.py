"""Spatially homogeneous comparison system used as an oracle for the PDE solver.

    u' = u (r - d - a u),     v' = v (-m + c p u)

Started from the maxima of the initial data, (u*(t), v*(t)) dominates the PDE
solution, so max_x u(x, t) <= u*(t) for every run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fearbd.model import ModelParams


@dataclass(frozen=True)
class LogisticParams:
    r: float
    d: float
    a: float
    u0_star: float

    def __post_init__(self):
        if not self.u0_star > 0:
            raise ValueError("u0_star must be positive")

    @classmethod
    def from_model(cls, params: ModelParams, u0_star: float) -> "LogisticParams":
        return cls(params.r, params.d, params.a, u0_star)

    @property
    def K(self) -> float:
        s = self.r - self.d
        return s * self.u0_star / (s - self.a * self.u0_star)

    @property
    def K_tilde(self) -> float:
        return self.a * self.K / (self.r - self.d)


def u_star(t, lp: LogisticParams):
    """Closed-form logistic solution from u*(0) = u0_star.

    For r != d the ratio K e^{st}/(1 + K~ e^{st}) is evaluated as
    1/(e^{-st}(1/u0 - a/s) + a/s), which is the same function without the
    removable singularity at s = a u0 and without overflow for large t.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    u0, a = lp.u0_star, lp.a
    s = lp.r - lp.d
    if s == 0:
        out = u0 / (1.0 + a * t * u0)
    elif s == a * u0:
        out = np.full_like(t, u0)
    else:
        with np.errstate(over="ignore"):
            out = 1.0 / (np.exp(-s * t) * (1.0 / u0 - a / s) + a / s)
    return out if out.ndim else float(out)


def rk4(rhs, y0, t_end: float, dt: float, sample_every: int = 1):
    """Fixed-step classical Runge-Kutta; y0 may be any array shape."""
    if dt < 1e-14 or not math.isfinite(dt):
        raise FloatingPointError(f"step size underflow: dt = {dt!r}")
    n = int(round(t_end / dt))
    y = np.array(y0, dtype=float)
    ts, ys = [0.0], [y.copy()]
    h2, h6 = dt / 2.0, dt / 6.0
    for i in range(1, n + 1):
        k1 = rhs(y)
        k2 = rhs(y + h2 * k1)
        k3 = rhs(y + h2 * k2)
        k4 = rhs(y + dt * k3)
        y = y + h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if i % sample_every == 0 or i == n:
            ts.append(i * dt)
            ys.append(y.copy())
    return np.array(ts), np.array(ys)


def comparison_system(t_end: float, params: ModelParams, u0_star, v0_star,
                      dt: float = 1e-4, sample_every: int = 100):
    """RK4 trajectory of the comparison pair.

    Returns (t, u, v).  u0_star and v0_star may be arrays of equal shape to
    integrate many starts at once.
    """
    u0 = np.asarray(u0_star, dtype=float)
    v0 = np.asarray(v0_star, dtype=float)
    if np.any(u0 <= 0) or np.any(v0 <= 0):
        raise ValueError("u0_star and v0_star must be positive")
    s, a, m, cp = params.r - params.d, params.a, params.m, params.c * params.p

    def rhs(y):
        out = np.empty_like(y)
        u = y[0]
        out[0] = u * (s - a * u)
        out[1] = y[1] * (cp * u - m)
        return out

    t, y = rk4(rhs, np.stack([u0, v0]), t_end, dt, sample_every)
    return t, y[:, 0], y[:, 1]
