from __future__ import annotations

import math

import numpy as np
import pytest

from memerk.mlf import MlfParams, mlf_oracle
from memerk.oracle import (
    OracleConfig,
    OracleNotConverged,
    OracleScheme,
    duhamel_reference,
    ode_oracle,
    panel_moments,
)
from memerk.problems import sine_problem
from memerk.resolvent import KernelSpec, ModeResolvent, scalar_resolvent
from memerk.solvers import solve
from scipy import integrate
from scipy.special import gamma

LAM = math.pi**2


def test_exponential_resolvent_anchor():
    mr = ModeResolvent(KernelSpec.exponential(2.0), LAM)
    res = ode_oracle(mr, OracleConfig(substeps=1024), 1.0, 4)
    exact = scalar_resolvent(mr, res.times)
    assert np.max(np.abs(res.values - exact)) <= 1e-6


def test_riesz_resolvent_anchor_against_series_oracle():
    rho = 1.75
    mr = ModeResolvent(KernelSpec.riesz(rho), LAM)
    res = ode_oracle(mr, OracleConfig(substeps=1024), 1.0, 4)
    exact = [mlf_oracle(MlfParams(rho, 1.0), -LAM * t**rho) for t in res.times]
    assert np.max(np.abs(res.values - exact)) <= 1e-4


@pytest.mark.parametrize("scheme", list(OracleScheme))
def test_zero_eigenvalue_constant_forcing(kernel, scheme):
    mr = ModeResolvent(kernel, 0.0, test_only=True)
    res = ode_oracle(mr, OracleConfig(substeps=64, scheme=scheme, check=False), 2.0, 4, u0=0.5, forcing=lambda t: 1.0)
    assert res.values == pytest.approx(0.5 + res.times, abs=1e-13)


def test_config_validation():
    for bad in (32, 100, 0):
        with pytest.raises(ValueError):
            OracleConfig(substeps=bad)
    assert OracleConfig(scheme="resolvent-euler").scheme is OracleScheme.RESOLVENT_EULER
    with pytest.raises(ValueError):
        OracleConfig(scheme="midpoint")
    mr = ModeResolvent(KernelSpec.riesz(1.5), LAM)
    with pytest.raises(ValueError):
        ode_oracle(mr, OracleConfig(), None, 1)
    with pytest.raises(ValueError):
        ode_oracle(mr, OracleConfig(), 1.0, 0)


def test_nonconvergence_reported():
    # a contraction factor no refinement can meet
    mr = ModeResolvent(KernelSpec.riesz(1.5), LAM)
    with pytest.raises(OracleNotConverged):
        ode_oracle(mr, OracleConfig(substeps=64, contraction=1e-6), 1.0, 1, forcing=lambda t: 1.0 + t)


def test_panel_moments_match_quadrature():
    for kern in (KernelSpec.riesz(1.25), KernelSpec.riesz(1.75), KernelSpec.exponential(2.0)):
        k = 0.1
        m0, m1 = panel_moments(kern, k, 5)
        for p in range(5):
            lo = p * k
            w = {"weight": "alg", "wvar": (kern.rho - 2.0, 0.0)} if kern.rho and p == 0 else {}
            f0 = (lambda s: 1.0 / gamma(kern.rho - 1.0)) if (kern.rho and p == 0) else kern
            ref0 = integrate.quad(f0, lo, lo + k, epsabs=1e-15, **w)[0]
            ref1 = integrate.quad(lambda s: f0(s) * (s - lo) / k, lo, lo + k, epsabs=1e-15, **w)[0]
            assert m0[p] == pytest.approx(ref0, rel=1e-12)
            assert m1[p] == pytest.approx(ref1, rel=1e-12)


@pytest.mark.parametrize("kern,rate", [(KernelSpec.riesz(1.25), 1.0), (KernelSpec.riesz(1.5), 1.0), (KernelSpec.exponential(2.0), 1.8)])
def test_self_convergence_rate(kern, rate):
    mr = ModeResolvent(kern, LAM)
    d = [ode_oracle(mr, OracleConfig(substeps=s, check=False), 1.0, 1, forcing=lambda t: 1.0 + t).values[-1] for s in (128, 256, 512, 1024)]
    rates = [math.log2(abs(d[i + 1] - d[i]) / abs(d[i + 2] - d[i + 1])) for i in range(2)]
    assert min(rates) >= rate
    if kern.rate is not None:
        assert max(rates) <= 2.2


@pytest.mark.parametrize("kern", [KernelSpec.riesz(1.25), KernelSpec.riesz(1.5), KernelSpec.exponential(2.0)])
def test_cross_scheme_agreement(kern):
    mr = ModeResolvent(kern, LAM)
    f = lambda t: 1.0 + t
    a = ode_oracle(mr, OracleConfig(substeps=1024), 1.0, 4, forcing=f)
    b = ode_oracle(mr, OracleConfig(substeps=1024, scheme="resolvent-euler"), 1.0, 4, forcing=f)
    # the two errors can have opposite signs, so the bound is the sum of the estimates
    assert np.max(np.abs(a.values - b.values)) <= a.estimate + b.estimate
    exact = duhamel_reference(mr, 1.0, f, 1.0)
    assert abs(a.values[-1] - exact) <= a.estimate
    assert abs(b.values[-1] - exact) <= b.estimate


def test_duhamel_reference_closed_form():
    # lam = 0: s = 1 and the solution is u0 + int f
    mr = ModeResolvent(KernelSpec.riesz(1.5), 0.0, test_only=True)
    assert duhamel_reference(mr, 2.0, math.cos, 1.3) == pytest.approx(2.0 + math.sin(1.3), abs=1e-13)


def test_semilinear_problem_oracle():
    prob = sine_problem(KernelSpec.riesz(1.75), 8)
    res = ode_oracle(prob, OracleConfig(substeps=256), None, 4)
    assert res.values.shape == (5, 8)
    assert np.array_equal(res.values[0], prob.u0.coeffs)
    fine = solve(prob, "erk2", 512)
    assert np.max(np.abs(res.values[-1] - fine.final.coeffs)) <= res.estimate


def test_problem_horizon_override():
    prob = sine_problem(KernelSpec.exponential(2.0), 4)
    res = ode_oracle(prob, OracleConfig(substeps=64), 0.5, 2)
    assert res.times[-1] == 0.5
    assert res.fine_steps == 128
