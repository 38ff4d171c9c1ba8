from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from memerk.spectral import NonFiniteError, SpectralField, SpectralSpace, tail_bound_check, tail_norm

# 10^6-interval composite Simpson value of int_0^1 sin(sin(pi x)/sqrt 2) sqrt 2 sin(pi x) dx
SIN_FIRST_COEFF = 0.46939430219208217


def test_space_validation():
    with pytest.raises(ValueError):
        SpectralSpace(0)
    with pytest.raises(ValueError):
        SpectralSpace(8, 16)
    assert SpectralSpace(8).n_grid == 32
    assert SpectralSpace(8, 17).n_grid == 17


def test_eigenvalues():
    lam = SpectralSpace(10).eigenvalues
    assert np.allclose(lam, (np.arange(1, 11) * np.pi) ** 2, rtol=1e-15)
    assert np.all(np.diff(lam) > 0)


def test_project_basis_functions():
    sp = SpectralSpace(16)
    for j in range(1, 17):
        c = sp.project(sp.basis(j)).coeffs
        e = np.zeros(16)
        e[j - 1] = 1.0
        assert np.max(np.abs(c - e)) <= 1e-12


def test_project_zero_and_initial_data():
    sp = SpectralSpace(12)
    assert np.all(sp.project(np.zeros(sp.n_grid)).coeffs == 0)
    c = sp.project(np.sin(np.pi * sp.x) / math.sqrt(2)).coeffs
    assert c[0] == pytest.approx(0.5, abs=1e-15)
    assert np.max(np.abs(c[1:])) <= 1e-15


def test_synthesize_unit_vector():
    sp = SpectralSpace(5)
    e1 = np.zeros(5)
    e1[0] = 1.0
    assert np.allclose(sp.synthesize(e1), math.sqrt(2) * np.sin(np.pi * sp.x), atol=1e-15)


def test_shape_errors():
    sp = SpectralSpace(4)
    with pytest.raises(ValueError):
        sp.project(np.zeros(5))
    with pytest.raises(ValueError):
        sp.synthesize(np.zeros(3))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 40), data=st.data())
def test_round_trip_and_parseval(n, data):
    sp = SpectralSpace(n)
    c = data.draw(arrays(float, n, elements=st.floats(-10, 10)))
    vals = sp.synthesize(c)
    assert np.max(np.abs(sp.project(vals).coeffs - c)) <= 1e-12 * (1 + np.max(np.abs(c)))
    # interior grid quadrature of |v|^2 (v vanishes at both ends)
    grid_norm = math.sqrt(np.sum(vals**2) / (sp.n_grid + 1))
    assert grid_norm == pytest.approx(np.linalg.norm(c), rel=1e-10, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 20), data=st.data(), a=st.floats(-3, 3), b=st.floats(-3, 3))
def test_linearity(n, data, a, b):
    sp = SpectralSpace(n)
    u = data.draw(arrays(float, n, elements=st.floats(-5, 5)))
    v = data.draw(arrays(float, n, elements=st.floats(-5, 5)))
    lhs = sp.synthesize(a * u + b * v)
    rhs = a * sp.synthesize(u) + b * sp.synthesize(v)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * (1 + np.max(np.abs(u)) + np.max(np.abs(v)))


def test_projector_idempotent():
    sp = SpectralSpace(10, 41)
    rng = np.random.default_rng(3)
    once = sp.project(rng.standard_normal(sp.n_grid))
    twice = sp.project(sp.synthesize(once))
    assert np.allclose(once.coeffs, twice.coeffs, atol=1e-14)


def test_nonlinearity_identity_and_zero():
    sp = SpectralSpace(8)
    c = SpectralField(np.linspace(1, -1, 8))
    assert np.allclose(sp.apply_nonlinearity(c, lambda t, x, u: u, 0.0).coeffs, c.coeffs, atol=1e-12)
    assert np.all(sp.apply_nonlinearity(c, lambda t, x, u: 0.0 * u, 0.0).coeffs == 0)


def test_nonlinearity_sine_against_simpson():
    sp = SpectralSpace(64)
    u = SpectralField(np.r_[0.5, np.zeros(63)])
    coeff = sp.apply_nonlinearity(u, lambda t, x, v: np.sin(v), 0.0).coeffs[0]
    assert coeff == pytest.approx(SIN_FIRST_COEFF, abs=1e-12)


def test_aliasing_guard():
    # (psi_1^2, psi_2) = 2 sqrt 2 int sin^2(pi x) sin(2 pi x) dx = 0
    for n in (3, 8):
        sp = SpectralSpace(n, 2 * n + 1)
        e1 = SpectralField(np.r_[1.0, np.zeros(n - 1)])
        c = sp.apply_nonlinearity(e1, lambda t, x, u: u * u, 0.0).coeffs
        assert abs(c[1]) <= 1e-10


def test_nonlinearity_non_finite_is_flagged():
    sp = SpectralSpace(4)
    with pytest.raises(NonFiniteError):
        sp.apply_nonlinearity(sp.zeros(), lambda t, x, u: np.full_like(x, np.nan), 0.3)


@pytest.mark.parametrize(
    "n, nu, expected", [(1, 1.0, 1 / (4 * math.pi**2)), (5, 0.0, 1.0), (9, 0.5, 1 / (10 * math.pi))]
)
def test_tail_bound(n, nu, expected):
    assert tail_bound_check(SpectralSpace(n), nu) == pytest.approx(expected, rel=1e-15)


def test_tail_norm_is_attained_by_first_missing_mode():
    rng = np.random.default_rng(0)
    tail = rng.standard_normal(30)
    tail /= np.linalg.norm(tail)
    assert tail_norm(tail, 11, 0.5) <= tail_norm([1.0], 11, 0.5) + 1e-16
    with pytest.raises(ValueError):
        tail_bound_check(SpectralSpace(3), -0.5)


def test_norms():
    f = SpectralField([3.0, 4.0])
    assert f.norm() == 5.0
    assert f.v_norm(0.0) == 5.0
    assert f.v_norm(0.5) == pytest.approx(math.sqrt(9 * math.pi**2 + 16 * 4 * math.pi**2))
