"""Brute-force reference solutions on a fine uniform grid.

Not performance code. ``ProductTrapezoidal`` discretises

    u'(t) + lam int_0^t b(t - s) u(s) ds = f(t)

directly: the derivative by the trapezoidal rule and the memory term by
product integration, i.e. ``b`` integrated exactly against the piecewise
linear interpolant of ``u``. The panel moments come from Gauss-Legendre
quadrature of the smooth panels plus closed forms on the singular first
Riesz panel, so nothing here touches the Mittag-Leffler machinery.
``ResolventEuler`` is the exponential Euler method run on the fine grid.

Each call also solves on the grid with half as many substeps and with a
quarter as many; if the finer difference does not contract the result is
rejected.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import gamma, roots_legendre

from .resolvent import KernelKind, KernelSpec, ModeResolvent, resolvent_values, scalar_resolvent
from .solvers import ProblemSpec, solve_euler
from .spectral import NonFiniteError, SpectralField
from .tableau import LinearQuadratureRule, linear_weight_table

__all__ = [
    "OracleScheme",
    "OracleConfig",
    "OracleResult",
    "OracleNotConverged",
    "ode_oracle",
    "duhamel_reference",
    "panel_moments",
]


class OracleNotConverged(RuntimeError):
    """Successive refinements of the oracle do not contract."""


class OracleScheme(str, enum.Enum):
    PRODUCT_TRAPEZOIDAL = "product-trapezoidal"
    RESOLVENT_EULER = "resolvent-euler"


@dataclass(frozen=True)
class OracleConfig:
    substeps: int = 1024
    scheme: OracleScheme = OracleScheme.PRODUCT_TRAPEZOIDAL
    # accept when |u_n - u_{n/2}| <= contraction * |u_{n/2} - u_{n/4}| (or below floor)
    contraction: float = 0.75
    floor: float = 1e-13
    check: bool = True

    def __post_init__(self):
        object.__setattr__(self, "scheme", OracleScheme(self.scheme))
        s = self.substeps
        if s < 64 or s & (s - 1):
            raise ValueError(f"substeps must be a power of two >= 64, got {s}")


@dataclass
class OracleResult:
    """Fine-grid solution sampled at the coarse times.

    ``values`` is ``(M+1,)`` for a scalar mode, ``(M+1, N)`` for a problem.
    ``estimate`` is the max-norm difference to the half-resolution run.
    """

    times: np.ndarray
    values: np.ndarray
    estimate: float
    fine_steps: int


_GL_X, _GL_W = roots_legendre(20)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def panel_moments(kernel: KernelSpec, k: float, n: int):
    """``m0_p = int b`` and ``m1_p = int b (tau - p k)/k`` over ``[p k, (p+1) k]``, p < n."""
    p = np.arange(n, dtype=float)[:, None]
    tau = k * (p + _GL_X[None, :])
    if kernel.kind is KernelKind.RIESZ:
        beta = kernel.rho - 1.0
        with np.errstate(divide="ignore"):
            vals = tau ** (beta - 1.0) / gamma(beta)
        vals[0] = 0.0
    else:
        vals = np.exp(-kernel.rate * tau)
    m0 = k * (vals @ _GL_W)
    m1 = k * (vals @ (_GL_W * _GL_X))
    if kernel.kind is KernelKind.RIESZ and n:
        m0[0] = k**beta / gamma(beta + 1.0)
        m1[0] = k**beta / ((beta + 1.0) * gamma(beta))
    return m0, m1


def _lag_weights(kernel: KernelSpec, k: float, n: int):
    """Product-integration weights for a piecewise linear ``u``.

    ``int_0^{t_m} b(t_m - s) u(s) ds = sum_{i<m} omega_i u_{m-i} + m1_{m-1} u_0``:
    interior lags get ``omega_i = m0_i - m1_i + m1_{i-1}``, the oldest value
    only the end moment of its panel.
    """
    m0, m1 = panel_moments(kernel, k, n)
    w = np.zeros(n)
    w[:] = m0 - m1
    w[1:] += m1[:-1]
    return w, m1


def _product_trapezoidal(kernel, lam, u0, n, k, forcing, rhs):
    """Solve ``n`` fine steps; ``forcing(t)`` is known data, ``rhs(t, u)`` an extra implicit term."""
    lam = np.asarray(lam, dtype=float)
    u = np.empty((n + 1,) + np.shape(u0))
    u[0] = u0
    w, end = _lag_weights(kernel, k, n)
    denom = 1.0 + 0.5 * k * lam * w[0]
    f_prev = forcing(0.0) + (rhs(0.0, u[0]) if rhs else 0.0)
    conv_prev = np.zeros(np.shape(u0))
    for m in range(n):
        t1 = (m + 1) * k
        # convolution at t_{m+1} minus its omega_0 u_{m+1} term
        rest = np.tensordot(w[1 : m + 1], u[m:0:-1], axes=(0, 0)) + end[m] * u[0]
        known = u[m] + 0.5 * k * (f_prev + forcing(t1) - lam * (conv_prev + rest))
        nxt = known / denom
        if rhs is not None:
            for _ in range(50):
                cand = (known + 0.5 * k * rhs(t1, nxt)) / denom
                done = np.max(np.abs(cand - nxt)) <= 1e-15 * (1.0 + np.max(np.abs(cand)))
                nxt = cand
                if done:
                    break
            else:
                raise OracleNotConverged(f"implicit trapezoidal step {m + 1} did not converge")
        if not np.all(np.isfinite(nxt)):
            raise NonFiniteError(f"oracle produced non-finite values at fine step {m + 1}")
        u[m + 1] = nxt
        f_prev = forcing(t1) + (rhs(t1, nxt) if rhs else 0.0)
        conv_prev = w[0] * nxt + rest
    return u


def _scalar_run(mr: ModeResolvent, scheme, u0, forcing, T, n):
    k = T / n
    if scheme is OracleScheme.PRODUCT_TRAPEZOIDAL:
        return _product_trapezoidal(mr.kernel, mr.lam, float(u0), n, k, forcing, None)
    lam = np.array([mr.lam])
    b1 = linear_weight_table(LinearQuadratureRule((0.0,)), mr.kernel, lam, k, n)[:, 0, 0]
    times = k * np.arange(n + 1)
    s = resolvent_values(mr.kernel, mr.lam, times)
    f = np.array([forcing(t) for t in times[:-1]])
    u = np.empty(n + 1)
    u[0] = u0
    for m in range(1, n + 1):
        u[m] = s[m] * u0 + k * np.dot(b1[m - 1 :: -1], f[:m])
    return u


def _problem_run(problem: ProblemSpec, scheme, n):
    k = problem.horizon / n
    if scheme is OracleScheme.RESOLVENT_EULER:
        return solve_euler(problem, n).states
    space = problem.space
    lam = space.eigenvalues
    if problem.is_linear:
        return _product_trapezoidal(problem.kernel, lam, problem.u0.coeffs, n, k, problem.forcing_coeffs, None)
    f = problem.nonlinearity

    def rhs(t, c):
        return space.apply_nonlinearity(SpectralField(c), f, t).coeffs

    return _product_trapezoidal(problem.kernel, lam, problem.u0.coeffs, n, k, lambda t: 0.0, rhs)


def ode_oracle(
    target: ModeResolvent | ProblemSpec,
    config: OracleConfig = OracleConfig(),
    T: float | None = None,
    M: int = 1,
    *,
    u0: float = 1.0,
    forcing: Callable[[float], float] | None = None,
) -> OracleResult:
    """Reference solution at the ``M + 1`` coarse times ``j T / M``.

    ``target`` is a single mode (with scalar ``u0`` and ``forcing``, default
    the homogeneous resolvent problem) or a full :class:`ProblemSpec`, whose
    own horizon is used when ``T`` is omitted.
    """
    if M < 1:
        raise ValueError("need at least one coarse step")
    if isinstance(target, ProblemSpec):
        T = target.horizon if T is None else T
        if T != target.horizon:
            target = ProblemSpec(
                target.kernel, target.space, target.u0, T, target.forcing, target.nonlinearity, target.name
            )

        def run(n):
            return _problem_run(target, config.scheme, n)

    else:
        if T is None or not T > 0:
            raise ValueError("a positive horizon T is required for a scalar mode")
        fr = forcing if forcing is not None else (lambda t: 0.0)

        def run(n):
            return _scalar_run(target, config.scheme, u0, fr, T, n)

    n = M * config.substeps
    fine = run(n)[:: config.substeps]
    half = run(n // 2)[:: config.substeps // 2]
    estimate = float(np.max(np.abs(fine - half)))
    if config.check:
        quarter = run(n // 4)[:: config.substeps // 4]
        previous = float(np.max(np.abs(half - quarter)))
        if estimate > config.floor and estimate > config.contraction * previous:
            raise OracleNotConverged(
                f"refinement differences {previous:.3e} -> {estimate:.3e} do not contract "
                f"(factor {config.contraction})"
            )
    times = np.linspace(0.0, T, M + 1)
    return OracleResult(times, fine, estimate, n)


def duhamel_reference(mr: ModeResolvent, u0: float, forcing: Callable[[float], float], T: float, tol: float = 1e-13):
    """``s(T) u0 + int_0^T s(T - sigma) f(sigma) dsigma`` by adaptive quadrature.

    Exact solution of a linear single-mode problem up to ``tol``. The Riesz
    resolvent is not smooth at zero, so break points are graded towards
    ``sigma = T``.
    """
    points = None
    if mr.kernel.kind is KernelKind.RIESZ:
        points = [T * (1.0 - 2.0**-j) for j in range(1, 40)]
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(
                lambda s: scalar_resolvent(mr, T - s) * forcing(s), 0.0, T, epsabs=tol, epsrel=0.0, limit=500, points=points
            )
        except integrate.IntegrationWarning as exc:
            raise OracleNotConverged(f"variation-of-constants quadrature failed: {exc}") from exc
    return float(scalar_resolvent(mr, T) * u0 + val)
