"""Time stepping over the spectral space.

All schemes share the structure

    U_m = S_N(t_m) P_N u0 + h sum_{j<m} sum_i b_i(t_{m-j}) F_{j,i}

where ``F_{j,i}`` is the (projected) forcing at stage ``i`` of step ``j``.
The resolvent has no semigroup property, so the sum runs over the whole
history; it is evaluated directly, O(M**2 N s) work and O(M N s) memory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .resolvent import KernelSpec, resolvent_values
from .spectral import NonFiniteError, SpectralField, SpectralSpace
from .tableau import LinearQuadratureRule, erk2_tables, linear_weight_table

__all__ = [
    "ProblemSpec",
    "Trajectory",
    "solve_linear",
    "solve_euler",
    "solve_erk2",
    "solve",
    "METHODS",
]

METHODS = ("euler", "erk2", "quad1", "quad2", "quad3")

# forcing(t) -> coefficients (linear mode); nonlinearity(t, x, u) -> grid values
Forcing = Callable[[float], "SpectralField | np.ndarray"]
Nonlinearity = Callable[[float, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ProblemSpec:
    """``u' + int_0^t b(t-s) A u(s) ds = f`` on (0, 1), projected onto ``space``.

    Give ``forcing`` for a linear problem (a map from time to coefficients) or
    ``nonlinearity`` for a semilinear one (pointwise ``f(t, x, u)``). With
    neither the problem is homogeneous.
    """

    kernel: KernelSpec
    space: SpectralSpace
    u0: SpectralField
    horizon: float
    forcing: Forcing | None = None
    nonlinearity: Nonlinearity | None = None
    name: str = ""

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if not isinstance(self.u0, SpectralField):
            object.__setattr__(self, "u0", SpectralField(self.u0))
        if self.u0.n_modes != self.space.n_modes:
            raise ValueError(f"u0 has {self.u0.n_modes} modes, space has {self.space.n_modes}")
        if self.forcing is not None and self.nonlinearity is not None:
            raise ValueError("give either a forcing or a nonlinearity, not both")

    @property
    def is_linear(self) -> bool:
        return self.nonlinearity is None

    @property
    def is_homogeneous(self) -> bool:
        return self.forcing is None and self.nonlinearity is None

    def forcing_coeffs(self, t: float) -> np.ndarray:
        if self.forcing is None:
            return np.zeros(self.space.n_modes)
        val = self.forcing(t)
        c = val.coeffs if isinstance(val, SpectralField) else np.asarray(val, dtype=float)
        if c.shape != (self.space.n_modes,):
            raise ValueError(f"forcing returned shape {c.shape}, expected ({self.space.n_modes},)")
        if not np.all(np.isfinite(c)):
            raise NonFiniteError(f"forcing is not finite at t={t}")
        return c

    def as_semilinear(self) -> "ProblemSpec":
        """The same problem with a time-only forcing written as ``f(t, x, u)``."""
        if not self.is_linear:
            return self
        space = self.space

        def f(t, x, u):
            return space.synthesize(self.forcing_coeffs(t))

        return ProblemSpec(self.kernel, space, self.u0, self.horizon, nonlinearity=f, name=self.name)


@dataclass
class Trajectory:
    """Coefficient states at ``t_0..t_M`` plus the stage values of the history sums.

    ``stage_history[i]`` has shape ``(M, N)``: row ``j`` is the projected
    forcing at stage ``i`` of step ``j``.
    """

    times: np.ndarray
    states: np.ndarray
    stage_history: list[np.ndarray] = field(default_factory=list)
    method: str = ""

    @property
    def steps(self) -> int:
        return self.times.size - 1

    @property
    def h(self) -> float:
        return float(self.times[1] - self.times[0]) if self.steps else float("nan")

    def state(self, m: int) -> SpectralField:
        return SpectralField(self.states[m])

    @property
    def final(self) -> SpectralField:
        return SpectralField(self.states[-1])


def _grid(problem: ProblemSpec, M: int):
    if M < 0:
        raise ValueError("number of steps must be >= 0")
    h = problem.horizon / M if M else problem.horizon
    times = h * np.arange(M + 1) if M else np.zeros(1)
    return h, times


def _homogeneous_part(problem: ProblemSpec, t) -> np.ndarray:
    lam = problem.space.eigenvalues
    s = resolvent_values(problem.kernel, lam[None, :], np.asarray(t, dtype=float)[:, None])
    return s * problem.u0.coeffs[None, :]


def _project_f(space: SpectralSpace, c: np.ndarray, f, t: float, m: int) -> np.ndarray:
    try:
        return space.apply_nonlinearity(SpectralField(c), f, t).coeffs
    except NonFiniteError as exc:
        raise NonFiniteError(f"step {m}: {exc}") from exc


def _check_step(u: np.ndarray, m: int, t: float):
    if not np.all(np.isfinite(u)):
        raise NonFiniteError(f"non-finite state at step {m} (t={t})")


def solve_linear(problem: ProblemSpec, rule: LinearQuadratureRule, M: int) -> Trajectory:
    """Exponential quadrature rule of order ``rule.stages`` for a time-only forcing."""
    if not problem.is_linear:
        raise ValueError("solve_linear needs a time-only forcing")
    h, times = _grid(problem, M)
    n, s = problem.space.n_modes, rule.stages
    states = np.empty((M + 1, n))
    states[0] = problem.u0.coeffs
    if M == 0:
        return Trajectory(times, states, [np.empty((0, n)) for _ in range(s)], f"quad{s}")
    free = _homogeneous_part(problem, times)
    weights = linear_weight_table(rule, problem.kernel, problem.space.eigenvalues, h, M)
    forcing = np.zeros((s, M, n))
    if not problem.is_homogeneous:
        for j in range(M):
            for i, c in enumerate(rule.nodes):
                forcing[i, j] = problem.forcing_coeffs(times[j] + c * h)
    for m in range(1, M + 1):
        hist = np.einsum("jni,ijn->n", weights[m - 1 :: -1], forcing[:, :m])
        states[m] = free[m] + h * hist
        _check_step(states[m], m, times[m])
    return Trajectory(times, states, list(forcing), f"quad{s}")


def solve_euler(problem: ProblemSpec, M: int) -> Trajectory:
    """Exponential Euler: one stage at ``t_j`` with ``b_1 = phi_1``."""
    problem = problem.as_semilinear()
    h, times = _grid(problem, M)
    space = problem.space
    n = space.n_modes
    states = np.empty((M + 1, n))
    states[0] = problem.u0.coeffs
    hist = np.zeros((M, n))
    if M == 0:
        return Trajectory(times, states, [hist], "euler")
    free = _homogeneous_part(problem, times)
    b1 = linear_weight_table(LinearQuadratureRule((0.0,)), problem.kernel, space.eigenvalues, h, M)[..., 0]
    f = problem.nonlinearity
    for m in range(1, M + 1):
        hist[m - 1] = _project_f(space, states[m - 1], f, times[m - 1], m)
        states[m] = free[m] + h * np.einsum("jn,jn->n", b1[m - 1 :: -1], hist[:m])
        _check_step(states[m], m, times[m])
    return Trajectory(times, states, [hist], "euler")


def solve_erk2(problem: ProblemSpec, M: int, c2: float = 0.5) -> Trajectory:
    """Two-stage explicit exponential Runge-Kutta method of order two.

    The stage ``U_{m-1,2}`` carries its own history sum with the weights
    ``b^2_i``; at ``m = 1`` that sum is empty.
    """
    problem = problem.as_semilinear()
    h, times = _grid(problem, M)
    space = problem.space
    n = space.n_modes
    states = np.empty((M + 1, n))
    states[0] = problem.u0.coeffs
    f1 = np.zeros((M, n))
    f2 = np.zeros((M, n))
    if M == 0:
        if not (0.0 < c2 <= 1.0):
            raise ValueError(f"c2 must lie in (0, 1], got {c2}")
        return Trajectory(times, states, [f1, f2], "erk2")
    tab = erk2_tables(c2, problem.kernel, space.eigenvalues, h, M)
    free = _homogeneous_part(problem, times)
    free_stage = _homogeneous_part(problem, times[:-1] + c2 * h)
    f = problem.nonlinearity
    for m in range(1, M + 1):
        t_prev = times[m - 1]
        f1[m - 1] = _project_f(space, states[m - 1], f, t_prev, m)
        stage = free_stage[m - 1] + h * tab.a21 * f1[m - 1]
        if m >= 2:
            w = tab.b_sup[m - 2 :: -1]
            stage = stage + h * (
                np.einsum("jn,jn->n", w[..., 0], f1[: m - 1]) + np.einsum("jn,jn->n", w[..., 1], f2[: m - 1])
            )
        _check_step(stage, m - 1, t_prev + c2 * h)
        f2[m - 1] = _project_f(space, stage, f, t_prev + c2 * h, m)
        w = tab.b[m - 1 :: -1]
        states[m] = free[m] + h * (np.einsum("jn,jn->n", w[..., 0], f1[:m]) + np.einsum("jn,jn->n", w[..., 1], f2[:m]))
        _check_step(states[m], m, times[m])
    return Trajectory(times, states, [f1, f2], "erk2")


def solve(problem: ProblemSpec, method: str, M: int, c2: float = 0.5) -> Trajectory:
    """Dispatch on a method name from :data:`METHODS`."""
    if method == "euler":
        return solve_euler(problem, M)
    if method == "erk2":
        return solve_erk2(problem, M, c2)
    if method in ("quad1", "quad2", "quad3"):
        rule = LinearQuadratureRule.default(int(method[-1]), c2)
        return solve_linear(problem, rule, M)
    raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
