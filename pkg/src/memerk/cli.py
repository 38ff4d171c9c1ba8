"""Command line entry point: ``memerk {mlf,solve,check-order-conditions,convergence}``."""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from .harness import ConvergenceFailure, ExperimentPlan, run_convergence
from .mlf import MlfParams, mlf
from .oracle import OracleConfig, ode_oracle
from .problems import BUILTIN_PROBLEMS, builtin_problem
from .resolvent import KernelSpec
from .solvers import METHODS, solve
from .spectral import NonFiniteError, SpectralSpace
from .tableau import order_condition_sweep

EXIT_DIVERGED = 3


def _kernel(args) -> KernelSpec:
    if args.kernel == "riesz":
        return KernelSpec.riesz(args.rho)
    return KernelSpec.exponential(args.rate)


def _problem_name(spec: str) -> str:
    name = spec.split(":", 1)[1] if spec.startswith("builtin:") else spec
    if name not in BUILTIN_PROBLEMS:
        raise argparse.ArgumentTypeError(f"unknown problem {spec!r}")
    return name


def _add_problem_flags(p: argparse.ArgumentParser, defaults: bool = True):
    d = (lambda v: v) if defaults else (lambda v: None)
    p.add_argument("--kernel", choices=("riesz", "exp"), default=d("riesz"))
    p.add_argument("--rho", type=float, default=d(1.75), help="Riesz exponent, 1 < rho < 2")
    p.add_argument("--rate", type=float, default=d(2.0), help="exponential rate a, 0 < a <= 2")
    p.add_argument("--modes", type=int, default=d(256))
    p.add_argument("--grid", type=int, default=None, help="collocation points (default 4 * modes)")
    p.add_argument("--tmax", type=float, default=d(1.0))
    p.add_argument("--c2", type=float, default=d(0.5))
    p.add_argument("--problem", type=_problem_name, default=d("sine"), help="builtin:sine|zero|linear-const")


def _write(text: str, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_mlf(args) -> int:
    print(f"{float(mlf(MlfParams(args.alpha, args.beta), args.x)):.17g}")
    return 0


def cmd_solve(args) -> int:
    kernel = _kernel(args)
    problem = builtin_problem(args.problem, kernel, args.modes, args.grid, args.tmax)
    try:
        if args.method == "oracle-pt":
            res = ode_oracle(problem, OracleConfig(substeps=args.substeps), args.tmax, args.steps)
            times, states = res.times, np.atleast_2d(res.values)
        else:
            traj = solve(problem, args.method, args.steps, args.c2)
            times, states = traj.times, traj.states
    except NonFiniteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if args.coeffs:
        w.writerow(["t", "k", "coeff"])
        for t, c in zip(times, states):
            for k, v in enumerate(c, start=1):
                w.writerow([repr(float(t)), k, repr(float(v))])
    else:
        space: SpectralSpace = problem.space
        x = np.concatenate([[0.0], space.x, [1.0]])
        w.writerow(["t", "x", "u"])
        for t, c in zip(times, states):
            u = np.concatenate([[0.0], space.synthesize(c), [0.0]])
            for xi, ui in zip(x, u):
                w.writerow([repr(float(t)), repr(float(xi)), repr(float(ui))])
    _write(buf.getvalue(), args.output)
    norm = float(np.linalg.norm(states[-1]))
    print(f"{args.method}: {kernel.label}, N={args.modes}, M={args.steps}, |U(T)|={norm:.12e}", file=sys.stderr)
    return 0


def cmd_check(args) -> int:
    kernel = _kernel(args)
    lam = SpectralSpace(args.modes).eigenvalues
    hs = args.h if args.h else [args.tmax / args.steps]
    worst = 0.0
    print(f"# {kernel.label}, modes 1..{args.modes}, elapsed times t_1..t_{args.steps}, c2={args.c2}")
    print("h,condition,max_residual")
    for h in hs:
        for name, val in order_condition_sweep(kernel, lam, h, args.steps, args.c2).items():
            print(f"{h!r},{name},{val:.3e}")
            worst = max(worst, val)
    print(f"# max residual {worst:.3e}")
    return 0 if worst <= args.tol else 1


_CONFIG_KEYS = {
    "kernel": str,
    "rho": float,
    "rate": float,
    "modes": int,
    "grid": int,
    "tmax": float,
    "c2": float,
    "problem": _problem_name,
    "method": str,
    "steps_list": str,
    "reference_factor": int,
    "output": str,
}


def read_config(path) -> dict:
    """``key=value`` lines mirroring the long flags; ``#`` starts a comment."""
    out = {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key = key.strip().lstrip("-").replace("-", "_")
        if not sep or key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{n}: cannot use {raw.strip()!r}")
        out[key] = _CONFIG_KEYS[key](val.strip())
    return out


_CONVERGENCE_DEFAULTS = {
    "kernel": "riesz",
    "rho": 1.75,
    "rate": 2.0,
    "modes": 256,
    "grid": None,
    "tmax": 1.0,
    "c2": 0.5,
    "problem": "sine",
    "method": "euler",
    "steps_list": "16,32,64,128,256,512",
    "reference_factor": 2,
    "output": None,
}


def cmd_convergence(args) -> int:
    merged = dict(_CONVERGENCE_DEFAULTS)
    if args.config:
        merged.update(read_config(args.config))
    merged.update({k: v for k, v in vars(args).items() if k in _CONVERGENCE_DEFAULTS and v is not None})
    ns = argparse.Namespace(**merged)
    if ns.kernel not in ("riesz", "exp") or ns.method not in METHODS:
        print(f"error: bad kernel {ns.kernel!r} or method {ns.method!r}", file=sys.stderr)
        return 2
    steps = tuple(int(s) for s in str(ns.steps_list).split(","))
    problem = builtin_problem(ns.problem, _kernel(ns), ns.modes, ns.grid, ns.tmax)
    plan = ExperimentPlan(problem, ns.method, steps, ns.c2, ns.reference_factor)
    try:
        report = run_convergence(plan)
    except ConvergenceFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    if len(steps) >= 3 and not report.exact:
        report.metadata["fitted_order"] = f"{report.fitted_order():.4f}"
    _write(report.to_csv(), ns.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memerk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mlf", help="evaluate E_{alpha,beta}(x)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--x", type=float, required=True)
    p.set_defaults(func=cmd_mlf)

    p = sub.add_parser("solve", help="integrate a builtin problem and dump CSV")
    _add_problem_flags(p)
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--method", choices=METHODS + ("oracle-pt",), default="erk2")
    p.add_argument("--substeps", type=int, default=64, help="oracle-pt refinement factor (power of two >= 64)")
    p.add_argument("--coeffs", action="store_true", help="write t,k,coeff instead of t,x,u")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check-order-conditions", help="maximum residual of every order condition")
    _add_problem_flags(p)
    p.add_argument("--steps", type=int, default=32, help="elapsed times t_1..t_M")
    p.add_argument("--h", type=float, action="append", help="step size (repeatable; default tmax/steps)")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("convergence", help="empirical convergence study")
    _add_problem_flags(p, defaults=False)
    p.add_argument("--method", choices=METHODS, default=None)
    p.add_argument("--steps-list", dest="steps_list", default=None, help="comma separated, e.g. 16,32,64")
    p.add_argument("--reference-factor", dest="reference_factor", type=int, default=None)
    p.add_argument("--config", default=None, help="key=value file mirroring the flags")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_convergence)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
