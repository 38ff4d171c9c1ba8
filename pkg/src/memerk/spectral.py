"""Sine-basis spectral Galerkin discretisation of ``A = -d^2/dx^2`` on (0, 1).

Eigenpairs are ``psi_k(x) = sqrt(2) sin(k pi x)``, ``lam_k = (k pi)**2`` with
homogeneous Dirichlet conditions. Grid values live on the uniform interior
grid ``x_j = j/(G+1)``, ``j = 1..G``, and move to and from coefficients by a
type-I discrete sine transform. For functions spanned by the first ``G``
sine modes this reproduces the L2 inner products exactly; otherwise it is
the trapezoidal rule applied to ``(v, psi_k)``, which is what the discrete
projector means here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dst

__all__ = ["SpectralSpace", "SpectralField", "NonFiniteError", "tail_bound_check", "tail_norm"]


class NonFiniteError(FloatingPointError):
    """A nonlinearity or a time step produced NaN or infinity."""


@dataclass(frozen=True)
class SpectralField:
    """Coefficients ``(v, psi_k)``, k = 1..N."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1:
            raise ValueError("coefficients must be a 1-d vector")
        object.__setattr__(self, "coeffs", c)

    @property
    def n_modes(self) -> int:
        return self.coeffs.size

    def norm(self) -> float:
        """L2 norm (Parseval)."""
        return float(np.linalg.norm(self.coeffs))

    def v_norm(self, nu: float) -> float:
        """``||A**nu v||``, i.e. ``sqrt(sum lam_k**(2 nu) c_k**2)``."""
        lam = eigenvalues(self.n_modes)
        return float(np.sqrt(np.sum(lam ** (2.0 * nu) * self.coeffs**2)))

    def __add__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.coeffs * scalar)

    __rmul__ = __mul__


def eigenvalues(n_modes: int) -> np.ndarray:
    k = np.arange(1, n_modes + 1, dtype=float)
    return (k * np.pi) ** 2


@dataclass(frozen=True)
class SpectralSpace:
    """First ``n_modes`` sine modes sampled on ``n_grid`` interior points.

    ``n_grid`` defaults to ``4 * n_modes`` and must be at least
    ``2 * n_modes + 1`` so quadratic nonlinearities are not aliased.
    ``degenerate=True`` replaces every eigenvalue by zero (``A = 0``), a
    test-only mode in which all exponential weights reduce to classical
    polynomial quadrature.
    """

    n_modes: int
    n_grid: int | None = None
    degenerate: bool = False

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("need at least one mode")
        if self.n_grid is None:
            object.__setattr__(self, "n_grid", 4 * self.n_modes)
        if self.n_grid < 2 * self.n_modes + 1:
            raise ValueError(f"n_grid must be >= 2N+1 = {2 * self.n_modes + 1}, got {self.n_grid}")

    @property
    def x(self) -> np.ndarray:
        return np.arange(1, self.n_grid + 1) / (self.n_grid + 1.0)

    @property
    def eigenvalues(self) -> np.ndarray:
        if self.degenerate:
            return np.zeros(self.n_modes)
        return eigenvalues(self.n_modes)

    def eigenvalue(self, k: int) -> float:
        return 0.0 if self.degenerate else float((k * np.pi) ** 2)

    def basis(self, k: int) -> np.ndarray:
        """``psi_k`` on the grid."""
        return np.sqrt(2.0) * np.sin(k * np.pi * self.x)

    def project(self, samples) -> SpectralField:
        """Coefficients of grid samples (discrete ``P_N``)."""
        v = np.asarray(samples, dtype=float)
        if v.shape != (self.n_grid,):
            raise ValueError(f"expected {self.n_grid} samples, got shape {v.shape}")
        full = dst(v, type=1) * (np.sqrt(2.0) / (2.0 * (self.n_grid + 1)))
        return SpectralField(full[: self.n_modes])

    def synthesize(self, field: SpectralField | np.ndarray) -> np.ndarray:
        """Grid values ``sum_k c_k psi_k(x_j)``."""
        c = field.coeffs if isinstance(field, SpectralField) else np.asarray(field, dtype=float)
        if c.shape != (self.n_modes,):
            raise ValueError(f"expected {self.n_modes} coefficients, got shape {c.shape}")
        padded = np.zeros(self.n_grid)
        padded[: self.n_modes] = c
        return dst(padded, type=1) * (np.sqrt(2.0) / 2.0)

    def apply_nonlinearity(self, field: SpectralField, f, t: float) -> SpectralField:
        """``P_N f(t, x, u)`` with ``u`` the synthesised field (pseudospectral)."""
        u = self.synthesize(field)
        vals = np.asarray(f(t, self.x, u), dtype=float)
        if vals.shape == ():
            vals = np.full(self.n_grid, float(vals))
        if not np.all(np.isfinite(vals)):
            raise NonFiniteError(f"nonlinearity returned non-finite values at t={t}")
        return self.project(vals)

    def zeros(self) -> SpectralField:
        return SpectralField(np.zeros(self.n_modes))


def tail_norm(coeffs_beyond, first_mode: int, nu: float) -> float:
    """``||A**-nu (I - P_N) x||`` for the coefficients of modes ``first_mode, first_mode+1, ...``."""
    c = np.asarray(coeffs_beyond, dtype=float)
    k = np.arange(first_mode, first_mode + c.size, dtype=float)
    return float(np.sqrt(np.sum(((k * np.pi) ** 2) ** (-2.0 * nu) * c**2)))


def tail_bound_check(space: SpectralSpace, nu: float) -> float:
    """``||A**-nu (I - P_N)|| = lam_{N+1}**-nu``.

    The norm is attained by the unit vector of mode ``N+1``; this returns the
    closed form after confirming that the tail norm of that vector matches it.
    """
    if nu < 0:
        raise ValueError("nu must be >= 0")
    n = space.n_modes
    value = ((n + 1) * np.pi) ** (-2.0 * nu)
    attained = tail_norm([1.0], n + 1, nu)
    if not np.isclose(attained, value, rtol=1e-14, atol=0.0):
        raise AssertionError(f"tail norm {attained} differs from lam_(N+1)^-nu = {value}")
    return float(value)
