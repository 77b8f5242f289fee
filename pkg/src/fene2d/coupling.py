"""Micro-macro coupling: drag tensor, polymer stress, spatial transport of the
configuration coefficients and the Strang-split coupled step."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import fluid
from .configspace import BasisConstructionError, ConfigBasis, jacobi_rule, orthonormal_radial
from .fluid import BlowUpError, TorusGrid
from .fokker_planck import (
    FpOperator,
    apply_full_drift,
    drift_operator,
    fp_relax,
    nodal_rule_size,
    nodal_values,
    rotate,
)

DRAG_MODES = ("corotation", "full")


def sigma(grid: TorusGrid, uh, mode: str = "corotation"):
    """Nodal drag tensor; ``(grad u)[i, j] = d_i u_j``.

    corotation -> (grad u - grad u^T) / 2, so sigma[0, 1] = omega / 2;
    full -> grad u (negative control only).
    """
    G = fluid.velocity_gradient(grid, uh)
    if mode == "corotation":
        return 0.5 * (G - G.transpose(1, 0, 2, 3))
    if mode == "full":
        return G
    raise ValueError(f"unknown drag mode {mode!r}")


@dataclass(frozen=True, eq=False)
class StressTable:
    """Radial moments so that tau is a tiny linear map of the (0, n) and (2, n) coefficients.

    With M0[n] = int 2k s/(1-s) b_{0,n} psi_inf dR / pi-normalised and M2 the
    analogue for b_{2,n} (radial part only):
        tau11 = pi (M0 . c0 + M2 . Re c2)
        tau22 = pi (M0 . c0 - M2 . Re c2)
        tau12 = -pi M2 . Im c2
    """

    M0: np.ndarray
    M2: np.ndarray


def stress_table(basis: ConfigBasis) -> StressTable:
    if basis.m_max < 2:
        raise BasisConstructionError("stress needs the m = +-2 modes (m_max >= 2)")
    k = basis.k
    # int 2k R_i R_j/(1-s) b psi_inf dR = (2k/c0) * 0.5 * int (1-s)^(k-1) s^(1+|m|/2) p(s) ds * angular
    rule = jacobi_rule(basis.n_r + 4, k - 1.0, 0.0)
    s = rule.nodes
    pref = 2.0 * k / basis.eq.c0 * 0.5
    out = []
    for m in (0, 2):
        p, _ = orthonormal_radial(basis.n_r, k, m, s)
        out.append(pref * (p * s ** (1 + m // 2)) @ rule.weights)
    return StressTable(M0=out[0], M2=out[1])


def stress(cfg, table: StressTable):
    """Nodal (tau11, tau12, tau22) from half-stored coefficients ``cfg``."""
    cfg = np.asarray(cfg)
    c0 = np.tensordot(table.M0, cfg[0].real, axes=([0], [0]))
    c2 = np.tensordot(table.M2, cfg[2], axes=([0], [0]))
    iso = math.pi * c0
    dev = math.pi * c2.real
    return np.stack([iso + dev, -math.pi * c2.imag, iso - dev])


def stress_norms(grid: TorusGrid, tau):
    """(||tau||_{L^2}, ||tau||_{L^1}) with the Frobenius norm pointwise."""
    t11, t12, t22 = tau
    frob = np.sqrt(t11 ** 2 + 2.0 * t12 ** 2 + t22 ** 2)
    return math.sqrt(grid.l2sq_nodal(frob)), grid.integral(frob)


def _active_modes(cfg):
    return [m for m in range(cfg.shape[0]) if np.any(cfg[m])]


def transport_rate(grid: TorusGrid, cfg, u, modes=None):
    """Nodal -div(u c) for each active coefficient field (dealiased product)."""
    out = np.zeros_like(cfg)
    modes = _active_modes(cfg) if modes is None else modes
    ik1, ik2 = 1j * grid.k1, 1j * grid.k2
    for m in modes:
        f1 = grid.fft(u[0] * cfg[m])
        f2 = grid.fft(u[1] * cfg[m])
        out[m] = -grid.ifft((ik1 * f1 + ik2 * f2) * grid.dealias)
    out[0] = out[0].real
    return out


def advect_config(grid: TorusGrid, cfg, u, dt: float, check: bool = True):
    """Advance d_t c + div(u c) = 0 by one Heun step, per coefficient field.

    ``u`` is nodal and may carry a spatial mean; the mean part is integrated
    exactly as a spectral phase shift.
    """
    cfg = np.asarray(cfg)
    u = np.asarray(u, dtype=float)
    if check:
        fluid.check_cfl(grid, u, dt)
    mean = u.reshape(2, -1).mean(axis=1)
    up = u - mean[:, None, None]
    modes = _active_modes(cfg)
    shift = None
    if np.any(mean):
        shift = np.exp(-1j * dt * (grid.k1 * mean[0] + grid.k2 * mean[1]))

    def phase(c):
        if shift is None:
            return c
        out = grid.ifft(grid.fft(c) * shift)
        out[0] = out[0].real
        return out

    r1 = transport_rate(grid, cfg, up, modes)
    pred = phase(cfg + dt * r1)
    r2 = transport_rate(grid, pred, up, modes)
    out = phase(cfg + 0.5 * dt * r1) + 0.5 * dt * r2
    out[0] = out[0].real
    return out


def entropy_production(basis: ConfigBasis, cfg, sigma_field, chunk: int = 4096):
    """Nodal int_B (sigma R) (psi - psi_inf) . grad_R g dR, by quadrature.

    This is the configuration-entropy source of the drag term; it vanishes
    identically for antisymmetric sigma.
    """
    cfg = np.asarray(cfg)
    spatial = cfg.shape[2:]
    n_s, n_theta = nodal_rule_size(basis, 2)
    n_s += 2
    n_theta += 4
    flat = cfg.reshape(cfg.shape[:2] + (-1,))
    sig = np.asarray(sigma_field).reshape(2, 2, -1)
    npts = flat.shape[-1]
    out = np.empty(npts)
    for lo in range(0, npts, chunk):
        hi = min(npts, lo + chunk)
        q, g, rd = nodal_values(basis, flat[..., lo:hi], n_s, n_theta, with_gradient=True)
        unit = (np.cos(q.theta), np.sin(q.theta))
        acc = np.zeros_like(g)
        for a in range(2):
            for b in range(2):
                acc += sig[a, b, lo:hi, None] * unit[b] * rd[a]
        out[lo:hi] = (g * acc) @ q.weights
    return out.reshape(spatial)


@dataclass(eq=False)
class CoupledModel:
    grid: TorusGrid
    basis: ConfigBasis
    op: FpOperator
    table: StressTable = None
    drag: str = "corotation"
    nu: float = 1.0
    scheme: str = "exact"
    check_cfl: bool = True
    # below this max |c| the configuration is set exactly to equilibrium,
    # which keeps long runs out of subnormal arithmetic
    flush_below: float = 1e-250
    _drift: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.drag not in DRAG_MODES:
            raise ValueError(f"drag must be one of {DRAG_MODES}, got {self.drag!r}")
        self.basis.params.validate_for_simulation()
        if self.table is None:
            self.table = stress_table(self.basis)

    @property
    def drift(self):
        if self._drift is None:
            self._drift = drift_operator(self.basis)
        return self._drift

    def zero_config(self):
        return np.zeros((self.basis.m_max + 1, self.basis.n_r, self.grid.nx, self.grid.ny), dtype=complex)

    def stress(self, cfg):
        return stress(cfg, self.table)

    def stress_div_hat(self, cfg):
        if not (np.any(cfg[0]) or np.any(cfg[2])):
            return None
        return fluid.stress_divergence_hat(self.grid, self.stress(cfg))


@dataclass(frozen=True, eq=False)
class SimState:
    t: float
    uh: np.ndarray
    cfg: np.ndarray
    model: CoupledModel

    def mass_defect(self) -> float:
        return float(np.max(np.abs(self.cfg[0, 0])))


def _drift_half(model: CoupledModel, cfg, uh, dt):
    if model.drag == "corotation":
        return rotate(cfg, fluid.vorticity(model.grid, uh), dt)
    return apply_full_drift(model.drift, cfg, sigma(model.grid, uh, "full"), dt, substeps=2)


def _transport(model: CoupledModel, uh, cfg, dt):
    """Joint IF-Heun step for {advect_config + ns_step forced by P div tau(cfg)}."""
    grid = model.grid
    E = np.exp(-model.nu * dt * grid.ksq)
    modes = _active_modes(cfg)

    def rates(uh_, cfg_):
        u = grid.to_physical(uh_)
        ru = fluid.leray_project(grid, -fluid.advection_hat(grid, uh_, u)
                                 + _or_zero(model.stress_div_hat(cfg_)))
        rc = transport_rate(grid, cfg_, u, modes)
        return ru, rc, u

    ru1, rc1, u0 = rates(uh, cfg)
    if model.check_cfl:
        fluid.check_cfl(grid, u0, dt)
    uh_p = E * (uh + dt * ru1)
    cfg_p = cfg + dt * rc1
    ru2, rc2, _ = rates(uh_p, cfg_p)
    uh_new = E * (uh + 0.5 * dt * ru1) + 0.5 * dt * ru2
    uh_new[:, 0, 0] = 0.0
    cfg_new = cfg + 0.5 * dt * (rc1 + rc2)
    cfg_new[0] = cfg_new[0].real
    return uh_new, cfg_new


def _or_zero(x):
    return 0.0 if x is None else x


def coupled_step(state: SimState, dt: float) -> SimState:
    """Strang step: relax/2, drift/2, transport, drift/2, relax/2."""
    model = state.model
    if not np.any(state.cfg):
        # equilibrium is invariant under every configuration sub-step
        uh, _ = _transport(model, state.uh, state.cfg, dt)
        if not np.all(np.isfinite(uh)):
            raise BlowUpError(f"non-finite state at t={state.t + dt}")
        return replace(state, t=state.t + dt, uh=uh)
    cfg = fp_relax(state.cfg, model.op, 0.5 * dt, model.scheme)
    cfg = _drift_half(model, cfg, state.uh, 0.5 * dt)
    uh, cfg = _transport(model, state.uh, cfg, dt)
    cfg = _drift_half(model, cfg, uh, 0.5 * dt)
    cfg = fp_relax(cfg, model.op, 0.5 * dt, model.scheme)
    if cfg.size and np.max(np.abs(cfg)) < model.flush_below:
        cfg = np.zeros_like(cfg)
    if not (np.all(np.isfinite(uh)) and np.all(np.isfinite(cfg))):
        raise BlowUpError(f"non-finite state at t={state.t + dt}")
    return replace(state, t=state.t + dt, uh=uh, cfg=cfg)
