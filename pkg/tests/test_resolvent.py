from __future__ import annotations

import math

import numpy as np
import pytest

from memerk.mlf import MlfParams, mlf_oracle
from memerk.resolvent import (
    KernelSpec,
    ModeResolvent,
    QuadratureError,
    phi_quadrature,
    phi_scalar,
    phi_stack,
    phi_values,
    resolvent_values,
    riesz_phi_closed_form,
    scalar_resolvent,
)

from conftest import eigs

# closed form of the damped cosine at a=2, lam=pi^2, t=1, evaluated with 50 digits
S_EXP_PI2_T1 = -0.3428842030861527
# mlf_oracle(1.75, 1, -pi^2 0.5^1.75), 60 digits
S_RIESZ_175_PI2_HALF = -0.20712394072021034
# phi_quadrature at tol 1e-12 / 1e-13
PHI_RIESZ_175_K1 = 0.5181201731328154
PHI_EXP_K2 = 0.2747060296638015


def test_kernel_validation():
    for rho in (1.0, 2.0, 0.5, 2.5):
        with pytest.raises(ValueError):
            KernelSpec.riesz(rho)
    KernelSpec.riesz(2.0, allow_rho_two=True)
    for a in (0.0, -1.0, 2.5):
        with pytest.raises(ValueError):
            KernelSpec.exponential(a)


def test_mode_validation():
    with pytest.raises(ValueError):
        ModeResolvent(KernelSpec.riesz(1.5), 0.0)
    with pytest.raises(ValueError):
        ModeResolvent(KernelSpec.exponential(2.0), 1.0)  # 4 lam - a^2 = 0
    with pytest.raises(ValueError):
        ModeResolvent(KernelSpec.riesz(1.5), -1.0)


def test_kernel_values():
    t = np.array([0.5, 1.0, 2.0])
    assert np.allclose(KernelSpec.riesz(1.5)(t), t**-0.5 / math.gamma(0.5))
    assert np.allclose(KernelSpec.exponential(2.0)(t), np.exp(-2 * t))


def test_resolvent_at_zero(kernel):
    for lam in eigs(64)[::7]:
        assert scalar_resolvent(ModeResolvent(kernel, lam), 0.0) == 1.0


def test_resolvent_fixtures():
    assert scalar_resolvent(ModeResolvent(KernelSpec.exponential(2.0), math.pi**2), 1.0) == pytest.approx(
        S_EXP_PI2_T1, rel=1e-14
    )
    assert scalar_resolvent(ModeResolvent(KernelSpec.riesz(1.75), math.pi**2), 0.5) == pytest.approx(
        S_RIESZ_175_PI2_HALF, rel=1e-12
    )


def test_riesz_resolvent_against_oracle():
    mr = ModeResolvent(KernelSpec.riesz(1.25), 4 * math.pi**2)
    for t in (0.05, 0.3, 0.9):
        ref = mlf_oracle(MlfParams(1.25, 1.0), -mr.lam * t**1.25)
        assert scalar_resolvent(mr, t) == pytest.approx(ref, rel=1e-12, abs=1e-15)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        scalar_resolvent(ModeResolvent(KernelSpec.riesz(1.5), 1.0), -0.1)


@pytest.mark.parametrize("a", [0.5, 2.0])
@pytest.mark.parametrize("lam", [math.pi**2, 16 * math.pi**2, 400 * math.pi**2])
def test_exponential_ode_residual(a, lam):
    # s'' + a s' + lam s = 0, s(0) = 1, s'(0) = 0
    mr = ModeResolvent(KernelSpec.exponential(a), lam)
    d = 1e-4
    for t in (0.1, 0.37, 0.8):
        s = [scalar_resolvent(mr, t + j * d) for j in (-2, -1, 0, 1, 2)]
        d1 = (s[0] - 8 * s[1] + 8 * s[3] - s[4]) / (12 * d)
        d2 = (-s[0] + 16 * s[1] - 30 * s[2] + 16 * s[3] - s[4]) / (12 * d * d)
        assert abs(d2 + a * d1 + lam * s[2]) <= 1e-5 * (1 + lam)
    s = [scalar_resolvent(mr, j * d) for j in range(5)]
    assert abs((-25 * s[0] + 48 * s[1] - 36 * s[2] + 16 * s[3] - 3 * s[4]) / (12 * d)) <= 1e-5 * (1 + lam)


def test_uniform_bound(kernel):
    t = np.linspace(1e-3, 1.0, 400)[:, None]
    s = resolvent_values(kernel, eigs(64)[None, :], t)
    assert np.max(np.abs(s)) <= 1 + 1e-9


def test_fast_and_direct_resolvent_agree(kernel):
    t = np.linspace(0.0, 1.0, 129)[:, None]
    lam = eigs(64)[None, ::5]
    assert np.max(np.abs(resolvent_values(kernel, lam, t) - resolvent_values(kernel, lam, t, fast=False))) <= 1e-14


def test_phi_fixtures():
    mr = ModeResolvent(KernelSpec.riesz(1.75), math.pi**2)
    assert phi_scalar(mr, 1, 0.1, 0.3) == pytest.approx(PHI_RIESZ_175_K1, rel=1e-11)
    mr = ModeResolvent(KernelSpec.exponential(2.0), 4 * math.pi**2)
    assert phi_scalar(mr, 2, 0.05, 0.2) == pytest.approx(PHI_EXP_K2, rel=1e-11)


@pytest.mark.parametrize("k, expected", [(1, 1.0), (2, 0.5), (3, 1.0 / 6.0)])
def test_phi_degenerate_mode(kernel, k, expected):
    mr = ModeResolvent(kernel, 0.0, test_only=True)
    assert phi_scalar(mr, k, 0.1, 0.3) == expected
    assert phi_quadrature(mr, k, 0.1, 0.3) == pytest.approx(expected, abs=1e-14)


def test_phi_domain():
    mr = ModeResolvent(KernelSpec.riesz(1.5), 1.0)
    with pytest.raises(ValueError):
        phi_scalar(mr, 4, 0.1, 0.2)
    with pytest.raises(ValueError):
        phi_scalar(mr, 0, 0.1, 0.2)
    with pytest.raises(ValueError):
        phi_scalar(mr, 1, 0.1, 0.05)
    with pytest.raises(ValueError):
        phi_quadrature(mr, 1, 0.1, 0.05)


def test_phi_quadrature_budget_is_reported():
    mr = ModeResolvent(KernelSpec.exponential(2.0), 1e8)
    with pytest.raises(QuadratureError):
        phi_quadrature(mr, 1, 1.0, 1.0, tol=1e-300)


def test_phi_bound(kernel):
    h = 1 / 32
    t = h * np.arange(1, 33)[:, None]
    lam = eigs(64)[None, :]
    s_max = np.ones(t.shape)  # |s| <= 1, so max over any window is at most 1
    for k in (1, 2, 3):
        phi = phi_values(kernel, lam, k, h, t)
        assert np.all(np.abs(phi) <= (1 + 1e-9) * s_max / math.factorial(k))


def test_phi_stack_matches_single_orders(kernel):
    h = 1 / 16
    t = h * np.arange(1, 25)[:, None]
    lam = eigs(32)[None, :]
    stack = phi_stack(kernel, lam, 3, h, t)
    for k in (1, 2, 3):
        assert np.max(np.abs(stack[..., k - 1] - phi_values(kernel, lam, k, h, t))) <= 1e-15


def test_riesz_gauss_branch_matches_closed_form():
    # far from the origin both representations are valid; the closed form just cancels more
    rho, lam, h = 1.5, 9 * math.pi**2, 0.05
    t = h * np.array([9.0, 12.0, 20.0])
    for k in (1, 2, 3):
        far = phi_values(KernelSpec.riesz(rho), lam, k, h, t, fast=False)
        closed = riesz_phi_closed_form(rho, lam, k, h, t)
        assert np.allclose(far, closed, rtol=1e-8, atol=1e-12)


def test_example_identity_needs_time_factors():
    """int over one step of E_rho(-lam (t_m - s)^rho) ds.

    The standard integration identity gives t E_{rho,2}(-lam t^rho) differences;
    dropping the time factors (as in the printed form of that identity) does
    not reproduce the quadrature.
    """
    rho, lam, h, m, j = 1.75, math.pi**2, 0.1, 5, 2
    mr = ModeResolvent(KernelSpec.riesz(rho), lam)
    hi, lo = (m - j) * h, (m - j - 1) * h
    quad = h * phi_quadrature(mr, 1, h, hi, tol=1e-13)
    e2 = lambda t: mlf_oracle(MlfParams(rho, 2.0), -lam * t**rho)
    with_factors = hi * e2(hi) - lo * e2(lo)
    without = e2(hi) - e2(lo)
    assert with_factors == pytest.approx(quad, rel=1e-12)
    assert abs(without - quad) > 1e-3
