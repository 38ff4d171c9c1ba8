"""Scalar resolvents and phi-function scalars for one eigenmode.

For an eigenpair ``(lam, psi_k)`` of ``A`` the resolvent family acts on mode
``k`` as multiplication by ``s(t)``, the solution of

    s'(t) + lam * int_0^t b(t - tau) s(tau) dtau = 0,   s(0) = 1.

Two kernels are supported:

* Riesz, ``b(t) = t**(rho - 2) / Gamma(rho - 1)`` with ``1 < rho < 2``:
  ``s(t) = E_rho(-lam t**rho)``.
* exponential, ``b(t) = exp(-a t)`` with ``0 < a <= 2``: a damped cosine,
  ``s(t) = exp(-a t/2) (cos(w t) + a/(2w) sin(w t))``, ``w = sqrt(4 lam - a**2)/2``.

The phi scalars are the step moments

    phi_k(t) = h**-k int_0^h s(t - sigma) sigma**(k-1)/(k-1)! dsigma,

evaluated here in closed form. Arrays broadcast: eigenvalues along the last
axis, times along the first.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import gamma, roots_legendre

from .mlf import ml_table, mlf

__all__ = [
    "KernelKind",
    "KernelSpec",
    "ModeResolvent",
    "QuadratureError",
    "scalar_resolvent",
    "resolvent_values",
    "phi_scalar",
    "phi_values",
    "phi_stack",
    "phi_quadrature",
    "riesz_phi_closed_form",
    "MAX_PHI_ORDER",
]

MAX_PHI_ORDER = 3
# Riesz phi: integration identity while t <= NEAR_STEPS * h, Gauss-Legendre
# on the (analytic) step interval beyond, where the identity cancels badly
NEAR_STEPS = 8
_GL_NODES = 16


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class KernelKind(str, enum.Enum):
    RIESZ = "riesz"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class KernelSpec:
    """Memory kernel: Riesz with exponent ``rho`` or exponential with ``rate``.

    ``allow_rho_two`` admits the (test-only) limit ``rho = 2``, a constant
    kernel whose resolvent is ``cos(sqrt(lam) t)``.
    """

    kind: KernelKind
    rho: float | None = None
    rate: float | None = None
    allow_rho_two: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind(self.kind))
        if self.kind is KernelKind.RIESZ:
            if self.rho is None or not math.isfinite(self.rho):
                raise ValueError("Riesz kernel needs a finite rho")
            upper_ok = self.rho < 2.0 or (self.allow_rho_two and self.rho == 2.0)
            if not (self.rho > 1.0 and upper_ok):
                raise ValueError(f"Riesz kernel requires 1 < rho < 2, got {self.rho}")
        else:
            if self.rate is None or not (0.0 < self.rate <= 2.0):
                raise ValueError(f"exponential kernel requires 0 < a <= 2, got {self.rate}")

    @classmethod
    def riesz(cls, rho: float, allow_rho_two: bool = False) -> "KernelSpec":
        return cls(KernelKind.RIESZ, rho=float(rho), allow_rho_two=allow_rho_two)

    @classmethod
    def exponential(cls, rate: float = 2.0) -> "KernelSpec":
        return cls(KernelKind.EXPONENTIAL, rate=float(rate))

    @property
    def label(self) -> str:
        if self.kind is KernelKind.RIESZ:
            return f"riesz(rho={self.rho:g})"
        return f"exponential(a={self.rate:g})"

    def __call__(self, t):
        """Kernel values ``b(t)`` for ``t > 0``."""
        t = np.asarray(t, dtype=float)
        if self.kind is KernelKind.RIESZ:
            return t ** (self.rho - 2.0) / gamma(self.rho - 1.0)
        return np.exp(-self.rate * t)


@dataclass(frozen=True)
class ModeResolvent:
    """Kernel together with one eigenvalue ``lam``.

    ``lam = 0`` is only accepted with ``test_only=True``; the resolvent is
    then identically one whatever the kernel.
    """

    kernel: KernelSpec
    lam: float
    test_only: bool = False

    def __post_init__(self):
        if not math.isfinite(self.lam) or self.lam < 0:
            raise ValueError(f"eigenvalue must be >= 0, got {self.lam}")
        if self.lam == 0.0 and not self.test_only:
            raise ValueError("lam = 0 is a test-only degenerate mode; pass test_only=True")
        if self.lam > 0 and self.kernel.kind is KernelKind.EXPONENTIAL:
            if 4.0 * self.lam - self.kernel.rate**2 <= 0:
                raise ValueError("exponential kernel needs 4*lam - a**2 > 0 (underdamped)")


# ---------------------------------------------------------------------------
# resolvent values


def _exp_constants(rate: float, lam: np.ndarray):
    omega = np.sqrt(4.0 * lam - rate * rate) / 2.0
    mu = -0.5 * rate + 1j * omega
    coef = 1.0 - 0.5j * rate / omega
    return mu, coef


def _ml_neg(alpha: float, beta: float, y: np.ndarray, fast: bool) -> np.ndarray:
    """``E_{alpha,beta}(-y)`` for ``y >= 0``."""
    if fast:
        return ml_table(alpha, beta)(y)
    return np.asarray(mlf((alpha, beta), -y), dtype=float)


def _riesz_g(rho, beta, lam, tau, fast):
    """``tau**(beta-1) E_{rho,beta}(-lam tau**rho)``, the beta-fold integral of s."""
    tau = np.asarray(tau, dtype=float)
    lam = np.asarray(lam, dtype=float)
    tau, lam = np.broadcast_arrays(tau, lam)
    out = _ml_neg(rho, beta, (lam * tau**rho).ravel(), fast).reshape(tau.shape)
    return out * tau ** (beta - 1.0)


def resolvent_values(kernel: KernelSpec, lam, t, fast: bool = True) -> np.ndarray:
    """``s(t)`` for every pair of broadcast ``t`` and ``lam``.

    ``fast`` routes Mittag-Leffler evaluations through the cached Chebyshev
    tables instead of the direct evaluator.
    """
    t = np.asarray(t, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if np.any(t < 0):
        raise ValueError("resolvent needs t >= 0")
    t, lam = np.broadcast_arrays(t, lam)
    out = np.ones(t.shape)
    live = lam > 0
    if not live.any():
        return out
    if kernel.kind is KernelKind.RIESZ:
        out[live] = _ml_neg(kernel.rho, 1.0, lam[live] * t[live] ** kernel.rho, fast)
    else:
        mu, coef = _exp_constants(kernel.rate, lam[live])
        out[live] = (coef * np.exp(mu * t[live])).real
    return out


def scalar_resolvent(mr: ModeResolvent, t):
    """Resolvent scalar ``s(t)`` of one mode (direct Mittag-Leffler evaluation)."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("resolvent needs t >= 0")
    out = resolvent_values(mr.kernel, mr.lam, t_arr, fast=False)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# phi scalars


def _g_moments(z: np.ndarray, kmax: int) -> list[np.ndarray]:
    """``g_k(z) = int_0^1 exp(z u) u**(k-1)/(k-1)! du`` for k = 1..kmax."""
    z = np.asarray(z, dtype=complex)
    out = [np.empty_like(z) for _ in range(kmax)]
    small = np.abs(z) < 1.0
    if small.any():
        zs = z[small]
        for k in range(1, kmax + 1):
            term = np.ones_like(zs)
            acc = term / (math.factorial(k - 1) * k)
            for n in range(1, 30):
                term = term * zs / n
                acc = acc + term / (math.factorial(k - 1) * (n + k))
            out[k - 1][small] = acc
    big = ~small
    if big.any():
        zb = z[big]
        ez = np.exp(zb)
        g = (ez - 1.0) / zb
        out[0][big] = g
        for k in range(1, kmax):
            g = (ez / math.factorial(k) - g) / zb
            out[k][big] = g
    return out


def _phi_exponential(rate, lam, k, h, t):
    t, lam = np.broadcast_arrays(np.asarray(t, float), np.asarray(lam, float))
    mu, coef = _exp_constants(rate, lam)
    gk = _g_moments(-mu * h, k)[k - 1]
    return (coef * np.exp(mu * t) * gk).real


def riesz_phi_closed_form(rho, lam, k, h, t, fast: bool = False):
    """Riesz phi via ``int_0^z u**(b-1) E_{rho,b}(-lam u**rho) du = z**b E_{rho,b+1}(-lam z**rho)``.

    Valid for every ``t >= h`` but loses roughly ``(t/h)**k`` in relative
    accuracy to cancellation, which is why :func:`phi_values` only uses it
    near the origin.
    """
    t = np.asarray(t, dtype=float)
    lo = t - h

    def g(beta, tau):
        return _riesz_g(rho, beta, lam, tau, fast)

    if k == 1:
        return (g(2.0, t) - g(2.0, lo)) / h
    if k == 2:
        return (g(3.0, t) - g(3.0, lo) - h * g(2.0, lo)) / h**2
    if k == 3:
        return (g(4.0, t) - g(4.0, lo) - h * g(3.0, lo) - 0.5 * h * h * g(2.0, lo)) / h**3
    raise ValueError(f"phi order k must be in 1..{MAX_PHI_ORDER}")


def _gauss_weights(kmax: int):
    nodes, weights = roots_legendre(_GL_NODES)
    theta = 0.5 * (nodes + 1.0)
    w = np.stack([0.5 * weights * theta ** (k - 1) / math.factorial(k - 1) for k in range(1, kmax + 1)], axis=1)
    return theta, w


def _phi_riesz_gauss(rho, lam, k, h, t, fast):
    return _riesz_gauss_stack(rho, lam, k, h, t, fast)[..., k - 1]


def _riesz_gauss_stack(rho, lam, kmax, h, t, fast):
    theta, w = _gauss_weights(kmax)
    t = np.asarray(t, dtype=float)
    tau = t[..., None] - h * theta
    s = resolvent_values(KernelSpec.riesz(rho, allow_rho_two=True), np.asarray(lam)[..., None], tau, fast)
    return s @ w


def _phi_riesz(rho, lam, k, h, t, fast):
    t, lam = np.broadcast_arrays(np.asarray(t, float), np.asarray(lam, float))
    out = np.empty(t.shape)
    near = t <= NEAR_STEPS * h * (1.0 + 1e-12)
    if near.any():
        out[near] = riesz_phi_closed_form(rho, lam[near], k, h, t[near], fast)
    if (~near).any():
        out[~near] = _phi_riesz_gauss(rho, lam[~near], k, h, t[~near], fast)
    return out


def phi_values(kernel: KernelSpec, lam, k: int, h: float, t, fast: bool = True) -> np.ndarray:
    """Vectorised phi scalars ``phi_{k,h}(t)`` over broadcast ``lam`` and ``t``."""
    if k not in range(1, MAX_PHI_ORDER + 1):
        raise ValueError(f"phi order k must be in 1..{MAX_PHI_ORDER}, got {k}")
    if not h > 0:
        raise ValueError("step h must be positive")
    t = np.asarray(t, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if np.any(t < h * (1.0 - 1e-12)):
        raise ValueError("phi is defined for t >= h")
    t, lam = np.broadcast_arrays(t, lam)
    out = np.full(t.shape, 1.0 / math.factorial(k))
    live = lam > 0
    if live.any():
        if kernel.kind is KernelKind.RIESZ:
            out[live] = _phi_riesz(kernel.rho, lam[live], k, h, t[live], fast)
        else:
            out[live] = _phi_exponential(kernel.rate, lam[live], k, h, t[live])
    return out


def phi_stack(kernel: KernelSpec, lam, kmax: int, h: float, t, fast: bool = True) -> np.ndarray:
    """``phi_k`` for k = 1..kmax at once, stacked along a new last axis.

    Same values as :func:`phi_values`; the resolvent samples behind the
    Gauss-Legendre and exponential paths are shared between the orders.
    """
    if kmax not in range(1, MAX_PHI_ORDER + 1):
        raise ValueError(f"phi order must be in 1..{MAX_PHI_ORDER}, got {kmax}")
    if not h > 0:
        raise ValueError("step h must be positive")
    t, lam = np.broadcast_arrays(np.asarray(t, float), np.asarray(lam, float))
    if np.any(t < h * (1.0 - 1e-12)):
        raise ValueError("phi is defined for t >= h")
    out = np.empty(t.shape + (kmax,))
    out[...] = [1.0 / math.factorial(k) for k in range(1, kmax + 1)]
    live = lam > 0
    if not live.any():
        return out
    tl, ll = t[live], lam[live]
    if kernel.kind is KernelKind.EXPONENTIAL:
        mu, coef = _exp_constants(kernel.rate, ll)
        front = coef * np.exp(mu * tl)
        moments = _g_moments(-mu * h, kmax)
        out[live] = np.stack([(front * g).real for g in moments], axis=-1)
        return out
    block = np.empty(tl.shape + (kmax,))
    near = tl <= NEAR_STEPS * h * (1.0 + 1e-12)
    if near.any():
        block[near] = np.stack(
            [riesz_phi_closed_form(kernel.rho, ll[near], k, h, tl[near], fast) for k in range(1, kmax + 1)], axis=-1
        )
    if (~near).any():
        block[~near] = _riesz_gauss_stack(kernel.rho, ll[~near], kmax, h, tl[~near], fast)
    out[live] = block
    return out


def phi_scalar(mr: ModeResolvent, k: int, h: float, t: float) -> float:
    """``phi_{k,h}(t)`` of one mode, k in 1..3, t >= h."""
    return float(phi_values(mr.kernel, mr.lam, k, h, t, fast=False))


def phi_quadrature(mr: ModeResolvent, k: int, h: float, t: float, tol: float = 1e-12) -> float:
    """Adaptive Gauss-Kronrod value of the phi integral, as an independent check.

    The integrand uses :func:`scalar_resolvent`. When ``t = h`` the Riesz
    resolvent is not smooth at the right end, so break points are graded
    geometrically towards it.
    """
    if k not in range(1, MAX_PHI_ORDER + 1):
        raise ValueError(f"phi order k must be in 1..{MAX_PHI_ORDER}, got {k}")
    if t < h * (1.0 - 1e-12):
        raise ValueError("phi is defined for t >= h")
    fact = math.factorial(k - 1)

    def integrand(theta):
        return scalar_resolvent(mr, max(t - h * theta, 0.0)) * theta ** (k - 1) / fact

    points = None
    # only t = h reaches the non-smooth point s(0+); later steps are analytic
    if mr.kernel.kind is KernelKind.RIESZ and t - h < 0.5 * h:
        points = [1.0 - 2.0**-j for j in range(1, 30)]
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=tol, epsrel=0.0, limit=400, points=points)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"phi quadrature failed for k={k}, h={h}, t={t}: {exc}") from exc
    return float(val)
