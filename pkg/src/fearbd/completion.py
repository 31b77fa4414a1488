"""Completion of the figure scenarios from their published observables.

Each figure scenario is specified only by a, d2, the coexistence state
(u~, v~) and the ratio M/d1; r, d, c, m, p, q, k and d1 are left open.  The
completion here is a closed construction rather than a search:

1. fix lam = u~/(1 + v~) (one value fits both targets to 5 decimals);
2. pick round values of k, q, d, m, p;
3. c = m (1/lam + q)/p makes m/(cp - mq) equal lam;
4. r = (1 + k v~)(d + a u~ + p v~/(1 + q u~ + v~)) puts (u~, v~) on the
   prey nullcline, so it is the coexistence state;
5. d1 = M/(M/d1 target), with M the Jacobian entry at (u~, v~).

Round values were chosen so both fixed-point hypotheses hold, the kinetics are
stable (PN - MQ > 0, M < Q) and the Turing window holds the target
mode count.  Steps 3-5 are reproduced by ``complete`` and checked in tests
against the committed config files.
"""

from __future__ import annotations

from dataclasses import dataclass

from fearbd.model import ModelParams, jacobian_at

LAMBDA = 0.0338987


@dataclass(frozen=True)
class FigureTarget:
    a: float
    d2: float
    u_tilde: float
    v_tilde: float
    m_over_d1: float


@dataclass(frozen=True)
class RoundChoice:
    k: float
    q: float
    d: float
    m: float
    p: float


TARGETS = {
    1: FigureTarget(a=0.1, d2=0.1, u_tilde=0.16608, v_tilde=3.89934, m_over_d1=2.407),
    2: FigureTarget(a=0.055, d2=0.2, u_tilde=0.16675, v_tilde=3.91904, m_over_d1=10.095),
}

CHOICES = {
    1: RoundChoice(k=0.01, q=100.0, d=0.01, m=0.12, p=0.26),
    2: RoundChoice(k=0.01, q=100.0, d=0.01, m=0.4, p=0.55),
}


def complete(target: FigureTarget, choice: RoundChoice, lam: float = LAMBDA) -> ModelParams:
    v = target.v_tilde
    u = lam * (1.0 + v)
    k, q, d, m, p, a = choice.k, choice.q, choice.d, choice.m, choice.p, target.a
    c = m * (1.0 / lam + q) / p
    r = (1.0 + k * v) * (d + a * u + p * v / (1.0 + q * u + v))
    trial = ModelParams(r=r, d=d, a=a, c=c, m=m, p=p, q=q, k=k, d1=1.0, d2=target.d2)
    M = jacobian_at(trial, u, v).M
    return trial.replace(d1=M / target.m_over_d1)


def figure_params(figure: int) -> ModelParams:
    return complete(TARGETS[figure], CHOICES[figure])
