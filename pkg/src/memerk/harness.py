"""Convergence studies: reference protocol, error table, empirical orders, CSV."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .solvers import METHODS, ProblemSpec, solve
from .spectral import NonFiniteError

__all__ = [
    "ExperimentPlan",
    "ErrorReport",
    "ConvergenceFailure",
    "run_convergence",
    "estimate_order",
    "snapshot_solution",
    "EXACT_THRESHOLD",
]

# errors at or below this are roundoff; orders computed from them mean nothing
EXACT_THRESHOLD = 1e-12


class ConvergenceFailure(RuntimeError):
    """A solve in the study diverged."""


@dataclass(frozen=True)
class ExperimentPlan:
    """One method on one problem at several step counts.

    The reference solution uses ``reference_factor * max(step_counts)`` steps,
    i.e. a step ``reference_factor`` times smaller than the smallest one.
    """

    problem: ProblemSpec
    method: str
    step_counts: tuple[int, ...] = (16, 32, 64, 128, 256, 512)
    c2: float = 0.5
    reference_factor: int = 2

    def __post_init__(self):
        object.__setattr__(self, "step_counts", tuple(int(m) for m in self.step_counts))
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if len(self.step_counts) < 1 or any(m < 1 for m in self.step_counts):
            raise ValueError("step counts must be positive")
        if any(b <= a for a, b in zip(self.step_counts, self.step_counts[1:])):
            raise ValueError("step counts must be strictly increasing")
        if self.reference_factor < 2:
            raise ValueError("reference must be finer than every run")
        ref = self.reference_steps
        bad = [m for m in self.step_counts if ref % m]
        if bad:
            raise ValueError(f"step counts {bad} do not divide the reference count {ref}")

    @property
    def reference_steps(self) -> int:
        return self.reference_factor * self.step_counts[-1]


@dataclass
class ErrorReport:
    """Rows ``(steps, h, error, order, seconds)`` plus string metadata.

    ``orders[i] = log2(error[i-1]/error[i])`` scaled by the actual step ratio;
    the first entry is NaN (written blank).
    """

    steps: np.ndarray
    hs: np.ndarray
    errors: np.ndarray
    orders: np.ndarray
    seconds: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return bool(np.all(self.errors <= EXACT_THRESHOLD))

    def fitted_order(self) -> float:
        return estimate_order(self.errors, self.hs)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        for key, val in self.metadata.items():
            buf.write(f"# {key}={val}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["steps", "h", "error", "order", "seconds"])
        for m, h, e, p, s in zip(self.steps, self.hs, self.errors, self.orders, self.seconds):
            writer.writerow([int(m), repr(float(h)), repr(float(e)), "" if math.isnan(p) else repr(float(p)), repr(float(s))])
        text = buf.getvalue()
        if path is not None:
            try:
                Path(path).write_text(text)
            except OSError as exc:
                raise OSError(f"cannot write report to {path}: {exc}") from exc
        return text

    @classmethod
    def from_csv(cls, path) -> "ErrorReport":
        return cls.parse(Path(path).read_text())

    @classmethod
    def parse(cls, text: str) -> "ErrorReport":
        """Inverse of :meth:`to_csv`."""
        meta, body = {}, []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key] = val
            elif line.strip():
                body.append(line)
        rows = list(csv.DictReader(body))
        col = lambda name: np.array([float(r[name]) if r[name] != "" else math.nan for r in rows])
        return cls(col("steps").astype(int), col("h"), col("error"), col("order"), col("seconds"), meta)


def estimate_order(errors, hs) -> float:
    """Least-squares slope of ``log(error)`` against ``log(h)``."""
    e = np.asarray(errors, dtype=float)
    h = np.asarray(hs, dtype=float)
    if e.shape != h.shape or e.size < 3:
        raise ValueError("need at least three (h, error) pairs")
    if np.any(~(e > 0)) or np.any(~(h > 0)):
        raise ValueError("errors and step sizes must be positive")
    slope, _ = np.polyfit(np.log(h), np.log(e), 1)
    return float(slope)


def _metadata(plan: ExperimentPlan) -> dict:
    p = plan.problem
    meta = {
        "kernel": p.kernel.kind.value,
        "rho" if p.kernel.rho is not None else "rate": p.kernel.rho if p.kernel.rho is not None else p.kernel.rate,
        "modes": p.space.n_modes,
        "grid": p.space.n_grid,
        "T": p.horizon,
        "method": plan.method,
        "c2": plan.c2,
        "reference_steps": plan.reference_steps,
        "norm": "terminal L2 (coefficient 2-norm)",
    }
    if p.name:
        meta["problem"] = p.name
    return {k: str(v) for k, v in meta.items()}


def _run(plan: ExperimentPlan, M: int):
    try:
        return solve(plan.problem, plan.method, M, plan.c2).final.coeffs
    except NonFiniteError as exc:
        raise ConvergenceFailure(f"{plan.method} with M={M} diverged: {exc}") from exc


def run_convergence(plan: ExperimentPlan) -> ErrorReport:
    """Terminal-time errors against the same method at the reference step."""
    reference = _run(plan, plan.reference_steps)
    steps = np.array(plan.step_counts)
    hs = plan.problem.horizon / steps
    errors, seconds = [], []
    for M in plan.step_counts:
        t0 = time.perf_counter()
        errors.append(float(np.linalg.norm(_run(plan, M) - reference)))
        seconds.append(time.perf_counter() - t0)
    errors = np.array(errors)
    orders = np.full(errors.size, math.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        orders[1:] = np.log(errors[:-1] / errors[1:]) / np.log(hs[:-1] / hs[1:])
    meta = _metadata(plan)
    report = ErrorReport(steps, hs, errors, orders, np.array(seconds), meta)
    if report.exact:
        report.metadata["exact"] = "true"
    return report


def snapshot_solution(problem: ProblemSpec, method: str, M: int, times, path=None, c2: float = 0.5) -> str:
    """CSV ``t,x,u`` of the solution surface at the requested grid times.

    Each requested time must be a multiple of ``h = T/M``. Includes the
    boundary points, where the solution vanishes.
    """
    traj = solve(problem, method, M, c2)
    h = problem.horizon / M
    space = problem.space
    x = np.concatenate([[0.0], space.x, [1.0]])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "x", "u"])
    for t in np.atleast_1d(np.asarray(times, dtype=float)):
        m = int(round(t / h))
        if not (0 <= m <= M) or abs(m * h - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"time {t} is not on the grid of step {h}")
        u = np.concatenate([[0.0], space.synthesize(traj.states[m]), [0.0]])
        for xi, ui in zip(x, u):
            writer.writerow([repr(float(m * h)), repr(float(xi)), repr(float(ui))])
    text = buf.getvalue()
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write snapshot to {path}: {exc}") from exc
    return text
