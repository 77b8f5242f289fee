import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fene2d.configspace import (
    BasisConstructionError,
    DomainError,
    Equilibrium,
    FeneParams,
    beta_moment,
    build_basis,
    disk_quadrature,
    equilibrium_density,
    gram_matrix,
    jacobi_rule,
    normalization_constant,
    potential_gradient,
    project,
)


def test_normalization_constant_values():
    assert normalization_constant(1.0) == pytest.approx(math.pi / 2, rel=1e-15)
    assert normalization_constant(0.0) == pytest.approx(math.pi)
    with pytest.raises(DomainError):
        normalization_constant(-1.0)


@given(st.floats(0.1, 8.0))
@settings(max_examples=25, deadline=None)
def test_equilibrium_has_unit_mass(k):
    q = disk_quadrature(k, 6, 4)
    assert q.weights.sum() == pytest.approx(1.0, rel=1e-12)


def test_equilibrium_density_domain():
    eq = Equilibrium.from_k(2.0)
    assert equilibrium_density([0.0, 0.0], eq) == pytest.approx(3 / math.pi)
    assert equilibrium_density([1.0, 0.0], eq) == 0.0
    with pytest.raises(DomainError):
        equilibrium_density([1.0, 0.1], eq)


def test_potential_gradient():
    np.testing.assert_allclose(potential_gradient([0.5, 0.0], 1.0), [4.0 / 3.0, 0.0])
    with pytest.raises(DomainError):
        potential_gradient([0.6, 0.8], 1.0)


@pytest.mark.parametrize("alpha,beta", [(1.0, 0.0), (2.5, 3.0), (0.0, 0.0), (-0.5, 1.0)])
def test_jacobi_rule_exact_degree(alpha, beta):
    rule = jacobi_rule(6, alpha, beta)
    for j in range(rule.exact_degree + 1):
        approx = rule.integrate(rule.nodes ** j)
        assert approx == pytest.approx(beta_moment(j, alpha, beta), rel=1e-12)


def test_jacobi_rule_rejects_bad_input():
    with pytest.raises(DomainError):
        jacobi_rule(0, 1.0, 0.0)
    with pytest.raises(DomainError):
        jacobi_rule(4, -1.0, 0.0)


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0, 7.0])
def test_basis_orthonormal(k):
    basis = build_basis(FeneParams(k, 12, 4))
    for m in range(5):
        np.testing.assert_allclose(gram_matrix(basis, m), np.eye(12), atol=1e-11)


def test_basis_rejects_small_quadrature():
    with pytest.raises(BasisConstructionError):
        build_basis(FeneParams(1.0, 8, 2), n_quad=4)


def test_params_validation():
    with pytest.raises(DomainError):
        FeneParams(k=0.0)
    with pytest.raises(DomainError):
        FeneParams(n_r=0)
    with pytest.raises(DomainError):
        FeneParams(1.0, 4, 1).validate_for_simulation()


def test_constant_mode_is_one(basis8):
    # b_{0,0} is the constant function 1 under the psi_inf-orthonormal scaling
    vals = basis8.radial(0, np.linspace(0, 0.99, 7))[0]
    np.testing.assert_allclose(vals, 1.0, rtol=1e-13)


def test_project_evaluate_round_trip(basis8):
    c = project(basis8, lambda x, y: x * x - y * y + 0.3 * x * y)
    s = np.array([0.1, 0.4, 0.8])
    th = np.array([0.2, 1.5, 3.0])
    r = np.sqrt(s)
    x, y = r * np.cos(th), r * np.sin(th)
    np.testing.assert_allclose(basis8.evaluate(c, s, th), x * x - y * y + 0.3 * x * y, atol=1e-12)
    # only m = 2 content
    assert np.max(np.abs(c[0])) < 1e-13 and np.max(np.abs(c[1])) < 1e-13


@pytest.mark.parametrize("k,expected", [(0.0, math.pi), (1.0, math.pi / 2), (2.0, math.pi / 3)])
def test_normalization_constant_closed_form(k, expected):
    assert normalization_constant(k) == pytest.approx(expected, rel=1e-15)


def test_equilibrium_density_examples():
    eq = Equilibrium.from_k(1.0)
    assert equilibrium_density([0.0, 0.0], eq) == pytest.approx(2 / math.pi)
    assert equilibrium_density([0.5, 0.0], eq) == pytest.approx(0.75 * 2 / math.pi)
    np.testing.assert_allclose(potential_gradient([0.0, 0.5], 2.0), [0.0, 8.0 / 3.0])
    np.testing.assert_allclose(potential_gradient([0.0, 0.0], 1.0), [0.0, 0.0])


def test_m2_ground_mode_is_r_squared():
    basis = build_basis(FeneParams(1.0, 4, 2))
    s = np.linspace(0.05, 0.95, 5)
    f = basis.radial(2, s)[0]
    ratio = f / s
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-12)
    # <b20, b20> = |a|^2 int s^2 psi_inf = 1 with int_B s^2 psi_inf dR = (k+1) B(3, k+1)
    assert ratio[0] ** 2 * 2.0 * beta_moment(2, 1.0, 0.0) == pytest.approx(1.0, rel=1e-12)
