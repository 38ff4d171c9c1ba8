"""Weights of exponential quadrature rules and of the two-stage exponential RK method.

Every weight is a scalar per eigenmode and per elapsed time ``t_l = l h``,
fixed by the phi scalars through the order conditions

    sum_i b_i(t_l) c_i**(k-1)/(k-1)! = phi_{k,h}(t_l),   k = 1..s

for the linear rule, and by the five conditions of the two-stage method

    b_1 + b_2 = phi_1(t),           b_2 c_2 = phi_2(t),
    a_21 = c_2 phi_{1,c_2 h}(c_2 h),
    b^2_1 + b^2_2 = phi_1(t + c_2 h), b^2_2 c_2 = phi_2(t + c_2 h).

Scalar helpers work on a :class:`ModeResolvent`; the ``*_table`` functions
build the ``(M, N, s)`` arrays the solvers consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .resolvent import KernelSpec, ModeResolvent, phi_scalar, phi_stack, phi_values

__all__ = [
    "LinearQuadratureRule",
    "ModeWeights",
    "Erk2Tables",
    "linear_weights",
    "erk2_coefficients",
    "order_condition_residuals",
    "linear_weight_table",
    "erk2_tables",
    "weights_from_phi",
    "order_condition_sweep",
]


@dataclass(frozen=True)
class LinearQuadratureRule:
    """Nodes ``0 = c_1 < c_2 < ... < c_s <= 1``; the rule has order ``s``."""

    nodes: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(v) for v in self.nodes)
        object.__setattr__(self, "nodes", c)
        if not 1 <= len(c) <= 3:
            raise ValueError("supported rules have 1 to 3 stages")
        if c[0] != 0.0:
            raise ValueError("first node must be 0")
        if any(b <= a for a, b in zip(c, c[1:])):
            raise ValueError(f"nodes must be strictly increasing, got {c}")
        if c[-1] > 1.0:
            raise ValueError("nodes must lie in [0, 1]")

    @classmethod
    def default(cls, stages: int, c2: float = 0.5) -> "LinearQuadratureRule":
        return {1: cls((0.0,)), 2: cls((0.0, c2)), 3: cls((0.0, 0.5, 1.0))}[stages]

    @property
    def stages(self) -> int:
        return len(self.nodes)

    @property
    def order(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class ModeWeights:
    """Weights for one mode and one elapsed time, with the nodes they belong to.

    ``a21`` and ``b_sup`` (the stage weights ``b^2_i``) are only set for the
    two-stage semilinear method.
    """

    b: np.ndarray
    nodes: tuple[float, ...]
    a21: float | None = None
    b_sup: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "b", np.atleast_1d(np.asarray(self.b, dtype=float)))
        object.__setattr__(self, "nodes", tuple(float(c) for c in self.nodes))
        if len(self.nodes) != self.b.size:
            raise ValueError("one weight per node")
        if self.b_sup is not None:
            object.__setattr__(self, "b_sup", np.asarray(self.b_sup, dtype=float))


def weights_from_phi(nodes, phi: np.ndarray) -> np.ndarray:
    """Solve the Vandermonde-type conditions by explicit inverses.

    ``phi`` has ``phi_1..phi_s`` along its last axis; the result has the
    weights ``b_1..b_s`` along the same axis.
    """
    c = tuple(float(v) for v in nodes)
    s = len(c)
    phi = np.asarray(phi, dtype=float)
    if phi.shape[-1] < s:
        raise ValueError(f"need phi_1..phi_{s}")
    out = np.empty(phi.shape[:-1] + (s,))
    if s == 1:
        out[..., 0] = phi[..., 0]
    elif s == 2:
        c2 = c[1]
        if c2 == 0.0:
            raise ZeroDivisionError("coincident nodes")
        out[..., 1] = phi[..., 1] / c2
        out[..., 0] = phi[..., 0] - out[..., 1]
    elif s == 3:
        c2, c3 = c[1], c[2]
        if c2 == 0.0 or c3 == c2:
            raise ZeroDivisionError("coincident nodes")
        out[..., 1] = (phi[..., 1] * c3 - 2.0 * phi[..., 2]) / (c2 * (c3 - c2))
        out[..., 2] = (2.0 * phi[..., 2] - phi[..., 1] * c2) / (c3 * (c3 - c2))
        out[..., 0] = phi[..., 0] - out[..., 1] - out[..., 2]
    else:
        raise ValueError("supported rules have 1 to 3 stages")
    return out


def _check_grid_time(h: float, t: float):
    if not h > 0:
        raise ValueError("step h must be positive")
    if t < h * (1.0 - 1e-12):
        raise ValueError("weights are defined for elapsed times t >= h")


def linear_weights(rule: LinearQuadratureRule, mr: ModeResolvent, h: float, t_l: float) -> ModeWeights:
    _check_grid_time(h, t_l)
    phi = np.array([phi_scalar(mr, k, h, t_l) for k in range(1, rule.stages + 1)])
    return ModeWeights(weights_from_phi(rule.nodes, phi), rule.nodes)


def _check_c2(c2: float):
    if not (0.0 < c2 <= 1.0):
        raise ValueError(f"c2 must lie in (0, 1], got {c2}")


def erk2_coefficients(c2: float, mr: ModeResolvent, h: float, t: float) -> ModeWeights:
    """All five coefficients of the two-stage method for one mode and elapsed time."""
    _check_c2(c2)
    _check_grid_time(h, t)
    nodes = (0.0, c2)
    b = weights_from_phi(nodes, [phi_scalar(mr, 1, h, t), phi_scalar(mr, 2, h, t)])
    b_sup = weights_from_phi(nodes, [phi_scalar(mr, 1, h, t + c2 * h), phi_scalar(mr, 2, h, t + c2 * h)])
    a21 = c2 * phi_scalar(mr, 1, c2 * h, c2 * h)
    return ModeWeights(b, nodes, a21=a21, b_sup=b_sup)


def order_condition_residuals(weights: ModeWeights, mr: ModeResolvent, h: float, t: float, p: int | None = None):
    """Residuals of the order conditions; all vanish for correctly built weights.

    Linear rule (no stage weights): ``M_k = sum_i b_i c_i**(k-1)/(k-1)! - phi_k(t)``
    for k = 1..p, p defaulting to the number of stages. Two-stage weights:
    the five semilinear residuals in the order listed in the module docstring.
    """
    c = np.asarray(weights.nodes)
    if weights.a21 is not None:
        c2 = c[1]
        b, bs = weights.b, weights.b_sup
        return np.array(
            [
                b[0] + b[1] - phi_scalar(mr, 1, h, t),
                b[1] * c2 - phi_scalar(mr, 2, h, t),
                weights.a21 - c2 * phi_scalar(mr, 1, c2 * h, c2 * h),
                bs[0] + bs[1] - phi_scalar(mr, 1, h, t + c2 * h),
                bs[1] * c2 - phi_scalar(mr, 2, h, t + c2 * h),
            ]
        )
    p = c.size if p is None else p
    res = []
    for k in range(1, p + 1):
        moment = np.sum(weights.b * c ** (k - 1)) / math.factorial(k - 1)
        res.append(moment - phi_scalar(mr, k, h, t))
    return np.array(res)


# ---------------------------------------------------------------------------
# tables for the solvers


def linear_weight_table(rule: LinearQuadratureRule, kernel: KernelSpec, lam, h: float, M: int, fast: bool = True):
    """``b_i(t_l)`` for ``l = 1..M`` and every eigenvalue, shape ``(M, N, s)``.

    Row ``l - 1`` holds elapsed time ``t_l``. Memory is ``M * N * s`` doubles,
    the dominant cost of a run.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if M < 1:
        return np.empty((0, lam.size, rule.stages))
    t = h * np.arange(1, M + 1)[:, None]
    phi = phi_stack(kernel, lam[None, :], rule.stages, h, t, fast)
    return weights_from_phi(rule.nodes, phi)


@dataclass
class Erk2Tables:
    """Coefficient tables of the two-stage method.

    ``b[l-1]`` and ``b_sup[l-1]`` belong to elapsed time ``t_l``; ``a21`` has
    one entry per mode.
    """

    c2: float
    b: np.ndarray
    b_sup: np.ndarray
    a21: np.ndarray
    meta: dict = field(default_factory=dict)


def erk2_tables(c2: float, kernel: KernelSpec, lam, h: float, M: int, fast: bool = True) -> Erk2Tables:
    _check_c2(c2)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    nodes = (0.0, c2)
    t = h * np.arange(1, M + 1)[:, None]
    if M >= 1:
        b = weights_from_phi(nodes, phi_stack(kernel, lam[None, :], 2, h, t, fast))
        b_sup = weights_from_phi(nodes, phi_stack(kernel, lam[None, :], 2, h, t + c2 * h, fast))
    else:
        b = b_sup = np.empty((0, lam.size, 2))
    a21 = c2 * phi_values(kernel, lam, 1, c2 * h, c2 * h, fast)
    return Erk2Tables(c2, b, b_sup, np.asarray(a21, dtype=float), {"h": h, "M": M})


def order_condition_sweep(kernel: KernelSpec, lam, h: float, M: int, c2: float = 0.5) -> dict[str, float]:
    """Largest residual of every order condition over modes ``lam`` and times ``t_1..t_M``.

    Weights come from the fast tables the solvers use; the phi values they
    are checked against come from the direct Mittag-Leffler evaluator, so
    the sweep also bounds the table error. Residuals are scaled by
    ``max(1, |phi|)``.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    t = h * np.arange(1, M + 1)[:, None]
    phi = phi_stack(kernel, lam[None, :], 3, h, t, fast=False)
    scale = np.maximum(1.0, np.abs(phi))
    out = {}
    for s in (1, 2, 3):
        rule = LinearQuadratureRule.default(s, c2)
        c = np.asarray(rule.nodes)
        b = linear_weight_table(rule, kernel, lam, h, M)
        for k in range(1, s + 1):
            moment = (b * c ** (k - 1)).sum(axis=-1) / math.factorial(k - 1)
            out[f"quad{s} M{k}"] = float(np.max(np.abs(moment - phi[..., k - 1]) / scale[..., k - 1]))
    tab = erk2_tables(c2, kernel, lam, h, M)
    phi_sup = phi_stack(kernel, lam[None, :], 2, h, t + c2 * h, fast=False)
    sup_scale = np.maximum(1.0, np.abs(phi_sup))
    a21 = c2 * phi_values(kernel, lam, 1, c2 * h, c2 * h, fast=False)
    rows = [
        (tab.b[..., 0] + tab.b[..., 1] - phi[..., 0]) / scale[..., 0],
        (tab.b[..., 1] * c2 - phi[..., 1]) / scale[..., 1],
        (tab.a21 - a21) / np.maximum(1.0, np.abs(a21)),
        (tab.b_sup[..., 0] + tab.b_sup[..., 1] - phi_sup[..., 0]) / sup_scale[..., 0],
        (tab.b_sup[..., 1] * c2 - phi_sup[..., 1]) / sup_scale[..., 1],
    ]
    for i, r in enumerate(rows, start=1):
        out[f"erk2 row{i}"] = float(np.max(np.abs(r)))
    return out
