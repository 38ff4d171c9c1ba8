"""Exponential integrators for integro-differential equations with memory.

Spectral Galerkin in space (sine modes on (0, 1)), exponential quadrature
and explicit exponential Runge-Kutta methods in time, for Riesz and
exponential memory kernels.
"""

from __future__ import annotations

from .harness import ErrorReport, ExperimentPlan, estimate_order, run_convergence, snapshot_solution
from .mlf import MlfParams, mlf, mlf_oracle
from .oracle import OracleConfig, OracleScheme, ode_oracle
from .problems import builtin_problem, sine_problem
from .resolvent import KernelSpec, ModeResolvent, phi_quadrature, phi_scalar, scalar_resolvent
from .solvers import ProblemSpec, Trajectory, solve, solve_erk2, solve_euler, solve_linear
from .spectral import SpectralField, SpectralSpace, tail_bound_check
from .tableau import LinearQuadratureRule, ModeWeights, erk2_coefficients, linear_weights, order_condition_residuals

__version__ = "0.1.0"

__all__ = [
    "ErrorReport",
    "ExperimentPlan",
    "KernelSpec",
    "LinearQuadratureRule",
    "MlfParams",
    "ModeResolvent",
    "ModeWeights",
    "OracleConfig",
    "OracleScheme",
    "ProblemSpec",
    "SpectralField",
    "SpectralSpace",
    "Trajectory",
    "builtin_problem",
    "erk2_coefficients",
    "estimate_order",
    "linear_weights",
    "mlf",
    "mlf_oracle",
    "ode_oracle",
    "order_condition_residuals",
    "phi_quadrature",
    "phi_scalar",
    "run_convergence",
    "scalar_resolvent",
    "sine_problem",
    "snapshot_solution",
    "solve",
    "solve_erk2",
    "solve_euler",
    "solve_linear",
    "tail_bound_check",
]
