"""Temporal convergence of exponential Euler and the two-stage method.

Two ways to measure the error: against a run of the same method at half
the smallest step (the usual protocol), and against an independent run of
the second-order method with many more steps. The first protocol inflates
first-order slopes, because the reference error is half the finest error.
"""

from __future__ import annotations

import numpy as np

from memerk import ExperimentPlan, KernelSpec, estimate_order, run_convergence, sine_problem, solve

steps = (16, 32, 64, 128, 256, 512)
hs = 1.0 / np.array(steps)

for kernel in (KernelSpec.riesz(1.25), KernelSpec.riesz(1.75), KernelSpec.exponential(2.0)):
    prob = sine_problem(kernel, n_modes=64)
    fine = solve(prob, "erk2", 4096).final.coeffs
    print(kernel.label)
    for method in ("euler", "erk2"):
        report = run_convergence(ExperimentPlan(prob, method, steps))
        errs = [np.linalg.norm(solve(prob, method, M).final.coeffs - fine) for M in steps]
        print(f"  {method:5s}  self-reference order {report.fitted_order():.3f}   fine-reference order {estimate_order(errs, hs):.3f}")
        print("         errors", " ".join(f"{e:.2e}" for e in report.errors))

# The report also goes to CSV with its metadata in '#' lines.
print(run_convergence(ExperimentPlan(sine_problem(KernelSpec.riesz(1.75), 64), "erk2", steps)).to_csv())
