import math

import numpy as np
import pytest

from fene2d import fluid
from fene2d.configspace import BasisConstructionError, FeneParams, build_basis, disk_quadrature
from fene2d.coupling import (
    CoupledModel,
    SimState,
    advect_config,
    coupled_step,
    entropy_production,
    sigma,
    stress,
    stress_table,
)
from fene2d.fluid import TorusGrid
from fene2d.fokker_planck import assemble_operator, fp_relax
from fene2d.harness.presets import m2_bump


def test_sigma_examples(grid32):
    x1, x2 = grid32.coords()
    z = np.zeros((2, 32, 32), complex)
    assert np.all(sigma(grid32, z) == 0)
    shear = grid32.fft(np.stack([np.sin(x2), np.zeros_like(x2)]))
    s = sigma(grid32, shear)
    np.testing.assert_allclose(s[0, 1], -0.5 * np.cos(x2), atol=1e-13)
    assert np.max(np.abs(s[0, 0])) < 1e-14 and np.max(np.abs(s[1, 1])) < 1e-14
    s = sigma(grid32, fluid.taylor_green(grid32) + shear)
    np.testing.assert_array_equal(s + s.transpose(1, 0, 2, 3), 0.0)
    with pytest.raises(ValueError):
        sigma(grid32, shear, "bogus")


def _dense_stress(basis, c):
    q = disk_quadrature(basis.k, 40, 64, alpha_shift=-1.0)
    g = basis.evaluate(c, q.s, q.theta)
    R = (q.R1, q.R2)
    # int 2k R_i R_j / (1 - s) g psi_inf dR
    return [2 * basis.k * np.sum(q.weights * R[i] * R[j] * g) for i, j in ((0, 0), (0, 1), (1, 1))]


@pytest.mark.parametrize("k", [1.0, 2.5])
def test_stress_matches_dense_quadrature(k):
    basis = build_basis(FeneParams(k, 6, 2))
    rng = np.random.default_rng(0)
    c = np.zeros((3, 6), complex)
    c[0, 1:] = rng.standard_normal(5)
    c[2] = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    c[1] = rng.standard_normal(6)
    np.testing.assert_allclose(stress(c, stress_table(basis)), _dense_stress(basis, c), atol=1e-11)


def test_stress_mode_structure(basis8):
    table = stress_table(basis8)
    assert np.all(stress(np.zeros((3, 8)), table) == 0)
    c = np.zeros((3, 8), complex)
    c[2] = 0.3 + 0.7j
    t11, t12, t22 = stress(c, table)
    assert abs(t11 + t22) < 1e-12
    c = np.zeros((3, 8), complex)
    c[0, 1:] = 0.4
    t11, t12, t22 = stress(c, table)
    assert t12 == 0 and t11 == t22
    with pytest.raises(BasisConstructionError):
        stress_table(build_basis(FeneParams(1.0, 4, 1)))


def test_advect_identity_and_conservation(grid32):
    cfg = m2_bump(grid32, 2, 3, 0.2, 0.7)
    z = np.zeros((2, 32, 32))
    np.testing.assert_array_equal(advect_config(grid32, cfg, z, 0.01), cfg)
    u = grid32.to_physical(fluid.taylor_green(grid32))
    out = advect_config(grid32, cfg, u, 0.01)
    before, after = cfg[2, 0].sum(), out[2, 0].sum()
    assert abs(after - before) < 1e-12 * abs(before)


def test_advect_uniform_translation_period():
    grid = TorusGrid(32, 32)
    x1, x2 = grid.coords()
    bump = grid.to_physical(grid.fft(np.exp(np.cos(x1) + np.sin(x2))) * grid.dealias)
    cfg = np.zeros((3, 2, 32, 32), complex)
    cfg[2, 0] = bump
    u = np.stack([np.ones_like(x1), 0.5 * np.ones_like(x1)])
    n = 800
    dt = 2 * math.pi / n * 2  # two periods in x1 is one period in x2
    out = cfg
    for _ in range(n):
        out = advect_config(grid, out, u, dt)
    err = math.sqrt(grid.l2sq_nodal(out[2, 0] - bump))
    assert err < 1e-8


def _model(grid, n_r=4, dt=1e-3, drag="corotation"):
    basis = build_basis(FeneParams(1.0, n_r, 2))
    return CoupledModel(grid=grid, basis=basis, op=assemble_operator(basis, dt), drag=drag)


def test_decoupled_fluid(grid32):
    model = _model(grid32)
    uh = fluid.taylor_green(grid32)
    st = SimState(0.0, uh, model.zero_config(), model)
    ref = uh
    for _ in range(20):
        st = coupled_step(st, 1e-3)
        ref = fluid.ns_step(grid32, ref, None, 1e-3)
    np.testing.assert_allclose(st.uh, ref, atol=1e-12 * np.max(np.abs(ref)))
    assert not np.any(st.cfg)


def test_uniform_config_relaxes_like_fp():
    grid = TorusGrid(16, 16)
    model = _model(grid, 6, 2e-3)
    c = np.zeros((3, 6), complex)
    c[2, :2] = [0.1, -0.05j]
    c[0, 1] = 0.08
    cfg = np.broadcast_to(c[:, :, None, None], (3, 6, 16, 16)).copy()
    st = SimState(0.0, np.zeros((2, 16, 16), complex), cfg, model)
    ref = c
    for _ in range(10):
        st = coupled_step(st, 2e-3)
        ref = fp_relax(ref, model.op, 2e-3)
    assert np.max(np.abs(st.uh)) == 0.0
    np.testing.assert_allclose(st.cfg[:, :, 3, 5], ref, atol=1e-13)
    assert st.mass_defect() == 0.0


def test_step_doubling_local_order(grid32):
    model = _model(grid32, 4, 0.0)
    uh = fluid.taylor_green(grid32) + grid32.fft(np.stack([np.sin(grid32.coords()[1]), 0 * grid32.coords()[0]]))
    st = SimState(0.0, uh, m2_bump(grid32, 2, 4, 0.3, 0.8), model)
    errs = []
    for dt in (1e-3, 5e-4, 2.5e-4):
        one = coupled_step(st, dt)
        two = coupled_step(coupled_step(st, dt / 2), dt / 2)
        errs.append(np.max(np.abs(one.uh - two.uh)) + np.max(np.abs(one.cfg - two.cfg)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 2.7), orders


def test_entropy_production_vanishes_for_corotation(grid32):
    model = _model(grid32)
    uh = fluid.taylor_green(grid32)
    cfg = m2_bump(grid32, 2, 4, 0.3, 0.8)
    cfg[1, 0] = 0.1
    co = entropy_production(model.basis, cfg, sigma(grid32, uh))
    full = entropy_production(model.basis, cfg, sigma(grid32, uh, "full"))
    assert np.max(np.abs(co)) < 1e-14
    assert np.max(np.abs(full)) > 1e-3


def test_model_validation(grid32):
    basis = build_basis(FeneParams(1.0, 4, 2))
    with pytest.raises(ValueError):
        CoupledModel(grid=grid32, basis=basis, op=assemble_operator(basis), drag="other")
