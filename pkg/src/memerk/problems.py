"""Builtin test problems on (0, 1) with homogeneous Dirichlet conditions."""

from __future__ import annotations

import numpy as np

from .resolvent import KernelSpec
from .solvers import ProblemSpec
from .spectral import SpectralSpace

__all__ = ["BUILTIN_PROBLEMS", "builtin_problem", "sine_problem"]

BUILTIN_PROBLEMS = ("sine", "zero", "linear-const")


def _u0(space: SpectralSpace):
    return space.project(np.sin(np.pi * space.x) / np.sqrt(2.0))


def sine_problem(kernel: KernelSpec, n_modes: int = 256, n_grid: int | None = None, T: float = 1.0) -> ProblemSpec:
    """``u0 = sin(pi x)/sqrt(2)`` with the nonlinearity ``f(u) = sin(u)``."""
    space = SpectralSpace(n_modes, n_grid)
    return ProblemSpec(kernel, space, _u0(space), T, nonlinearity=lambda t, x, u: np.sin(u), name="sine")


def builtin_problem(name: str, kernel: KernelSpec, n_modes: int = 256, n_grid: int | None = None, T: float = 1.0):
    """``sine``: the semilinear problem above. ``zero``: same data, no forcing.
    ``linear-const``: same data with the constant forcing ``f = 1``.
    """
    if name == "sine":
        return sine_problem(kernel, n_modes, n_grid, T)
    space = SpectralSpace(n_modes, n_grid)
    if name == "zero":
        return ProblemSpec(kernel, space, _u0(space), T, name="zero")
    if name == "linear-const":
        ones = space.project(np.ones(space.n_grid)).coeffs
        return ProblemSpec(kernel, space, _u0(space), T, forcing=lambda t: ones, name="linear-const")
    raise ValueError(f"unknown builtin problem {name!r}; choose from {', '.join(BUILTIN_PROBLEMS)}")
