"""Diffusive predator-prey model with fear effect and Beddington-DeAngelis response.

Equilibria, Turing (diffusion-driven) instability analysis, a 1-D Neumann
method-of-lines solver and a small CLI for reproducible runs and sweeps.
"""

from fearbd.model import (
    DomainError,
    JacobianEntries,
    ModelParams,
    ReactionRates,
    fear_factor,
    functional_response,
    jacobian_at,
    reaction,
)
from fearbd.equilibria import (
    CubicCoeffs,
    Equilibrium,
    HypothesisError,
    NoCoexistenceStructure,
    constant_equilibria,
    cubic_coeffs,
    solve_coexistence,
)
from fearbd.turing import (
    DispersionReport,
    NonexistenceReport,
    Spectrum,
    analyze,
    dispersion_H,
    mode_window,
    nonexistence_threshold,
    spectrum,
)
from fearbd.solver import (
    BlowUpError,
    Field,
    Grid1D,
    PositivityError,
    RunSummary,
    SnapshotSeries,
    SolverConfig,
    bound_monitor,
    integrate,
    laplacian_neumann,
    step,
)
from fearbd.oracle import LogisticParams, comparison_system, u_star

__version__ = "0.1.0"
