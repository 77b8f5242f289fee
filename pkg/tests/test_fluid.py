import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fene2d import fluid
from fene2d.fluid import StepSizeError, TorusGrid


def _rand_field(grid, seed):
    rng = np.random.default_rng(seed)
    return grid.fft(rng.standard_normal((2, grid.nx, grid.ny))) * grid.dealias


def test_grid_validation():
    with pytest.raises(ValueError):
        TorusGrid(48, 64)
    with pytest.raises(ValueError):
        TorusGrid(64, 64, -1.0)


def test_leray_examples(grid32):
    x1, x2 = grid32.coords()
    h = grid32.fft(np.sin(x1) * np.cos(2 * x2))
    grad = np.stack([1j * grid32.k1 * h, 1j * grid32.k2 * h])
    assert np.max(np.abs(fluid.leray_project(grid32, grad))) < 1e-12
    f = grid32.fft(np.stack([np.cos(x1), np.zeros_like(x1)]))
    assert np.max(np.abs(fluid.leray_project(grid32, f))) < 1e-12
    tg = fluid.taylor_green(grid32)
    np.testing.assert_allclose(fluid.leray_project(grid32, tg), tg, atol=1e-14 * np.max(np.abs(tg)))


@given(st.integers(0, 2 ** 31))
@settings(max_examples=20, deadline=None)
def test_leray_idempotent_and_divergence_free(seed):
    grid = TorusGrid(16, 16)
    p = fluid.leray_project(grid, _rand_field(grid, seed))
    np.testing.assert_allclose(fluid.leray_project(grid, p), p, atol=1e-12)
    assert fluid.max_divergence(grid, p) < 1e-14


def test_vorticity_examples(grid32):
    x1, x2 = grid32.coords()
    shear = grid32.fft(np.stack([np.sin(x2), np.zeros_like(x2)]))
    np.testing.assert_allclose(fluid.vorticity(grid32, shear), -np.cos(x2), atol=1e-13)
    # d1 u2 - d2 u1 = sin x1 sin x2 + sin x1 sin x2
    np.testing.assert_allclose(fluid.vorticity(grid32, fluid.taylor_green(grid32)),
                               2 * np.sin(x1) * np.sin(x2), atol=1e-13)
    assert np.all(fluid.vorticity(grid32, np.zeros((2, 32, 32), complex)) == 0)


def test_heat_semigroup_examples(grid32):
    f = _rand_field(grid32, 1)
    np.testing.assert_array_equal(fluid.heat_semigroup(grid32, f, 0.0), f)
    x1, _ = grid32.coords()
    g = grid32.fft(np.cos(x1))
    out = grid32.to_physical(fluid.heat_semigroup(grid32, g, math.log(2)))
    np.testing.assert_allclose(out, 0.5 * np.cos(x1), atol=1e-14)
    with pytest.raises(ValueError):
        fluid.heat_semigroup(grid32, f, -1.0)


def test_ns_step_zero_and_single_mode(grid32):
    z = np.zeros((2, 32, 32), complex)
    np.testing.assert_array_equal(fluid.ns_step(grid32, z, None, 0.01), z)
    x1, x2 = grid32.coords()
    uh = grid32.fft(np.stack([np.sin(x2), np.zeros_like(x2)]))
    e0 = fluid.energy(grid32, uh)
    for _ in range(100):
        uh = fluid.ns_step(grid32, uh, None, 0.01, advection=False)
    assert fluid.energy(grid32, uh) == pytest.approx(e0 * math.exp(-2.0), rel=1e-13)


def test_taylor_green_exact():
    grid = TorusGrid(64, 64)
    uh = fluid.taylor_green(grid)
    u0 = uh.copy()
    for _ in range(1000):
        uh = fluid.ns_step(grid, uh, None, 1e-3)
    err = math.sqrt(grid.l2sq(uh - u0 * math.exp(-2.0)))
    assert err < 1e-6


def test_cfl_guard(grid32):
    uh = 100.0 * fluid.taylor_green(grid32)
    with pytest.raises(StepSizeError):
        fluid.ns_step(grid32, uh, None, 0.1)


def test_energy_and_enstrophy_of_taylor_green(grid32):
    uh = fluid.taylor_green(grid32)
    # |u|^2 = sin^2 cos^2 + cos^2 sin^2 integrates to 2 pi^2 over [0, 2pi]^2
    assert fluid.energy(grid32, uh) == pytest.approx(2 * math.pi ** 2, rel=1e-13)
    assert fluid.enstrophy(grid32, uh) == pytest.approx(4 * math.pi ** 2, rel=1e-13)


def test_advection_is_gradient_for_taylor_green(grid32):
    uh = fluid.taylor_green(grid32)
    adv = fluid.leray_project(grid32, fluid.advection_hat(grid32, uh))
    assert np.max(np.abs(adv)) < 1e-10
