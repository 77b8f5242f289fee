"""Run driver: builds the model from a RunConfig, steps it and records diagnostics."""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .. import fluid
from ..analysis.diagnostics import DiagnosticsRow, compute_row, splitting_integral
from ..analysis.dyadic import besov_b011, dyadic_family
from ..configspace import FeneParams, build_basis
from ..coupling import CoupledModel, SimState, coupled_step
from ..fluid import BlowUpError, StepSizeError, TorusGrid
from ..fokker_planck import assemble_operator
from . import presets
from .config import RunConfig
from .io import Checkpoint, load_checkpoint, save_checkpoint, write_manifest, write_series

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunResult:
    status: int
    rows: list
    state: SimState | None
    mass_defect: float = 0.0
    message: str = ""
    extra: dict = field(default_factory=dict)


def build_model(rc: RunConfig) -> CoupledModel:
    grid = TorusGrid(rc.nx, rc.ny, rc.L)
    basis = build_basis(FeneParams(rc.k, rc.n_r, rc.m_max))
    op = assemble_operator(basis, rc.dt, rc.propagator)
    return CoupledModel(grid=grid, basis=basis, op=op, drag=rc.drag, nu=rc.nu, scheme=rc.propagator)


def initial_velocity(rc: RunConfig, grid: TorusGrid):
    if rc.u_preset == "zero":
        return np.zeros((2, grid.nx, grid.ny), dtype=complex)
    if rc.u_preset == "taylor_green":
        return presets.taylor_green(grid, rc.amplitude, rc.wavenumber)
    if rc.u_preset == "low_freq_random":
        return presets.low_freq_random(grid, rc.amplitude, rc.seed, rc.xi_cut)
    if rc.u_preset == "gaussian":
        return presets.gaussian_velocity(grid, rc.amplitude)
    ck = load_checkpoint(rc.u_file)
    if ck.uh.shape != (2, grid.nx, grid.ny):
        raise ValueError(f"{rc.u_file}: velocity grid does not match the run grid")
    return np.array(ck.uh)


def initial_config(rc: RunConfig, model: CoupledModel):
    grid = model.grid
    if rc.g_preset == "zero":
        return model.zero_config()
    if rc.g_preset == "m2_bump":
        return presets.m2_bump(grid, rc.m_max, rc.n_r, rc.g_amplitude, rc.envelope_scale)
    ck = load_checkpoint(rc.g_file)
    if ck.cfg.shape != model.zero_config().shape:
        raise ValueError(f"{rc.g_file}: configuration shape does not match the run")
    return np.array(ck.cfg)


def initial_state(rc: RunConfig, model: CoupledModel | None = None) -> SimState:
    model = model or build_model(rc)
    uh = initial_velocity(rc, model.grid)
    uh = fluid.leray_project(model.grid, uh)
    cfg = initial_config(rc, model)
    return SimState(t=0.0, uh=uh, cfg=cfg, model=model)


def n_steps(rc: RunConfig) -> int:
    n = int(round(rc.t_end / rc.dt))
    if abs(n * rc.dt - rc.t_end) > 1e-9 * max(1.0, rc.t_end):
        log.warning("t_end=%g is not a multiple of dt=%g; running %d steps", rc.t_end, rc.dt, n)
    return n


def _norm(grid, uh):
    return math.sqrt(fluid.energy(grid, uh))


def simulate(rc: RunConfig, state: SimState | None = None, on_sample=None) -> RunResult:
    """Step the coupled model; never raises on blow-up, reports it in the status."""
    state = state or initial_state(rc)
    model = state.model
    fam = dyadic_family(model.grid) if rc.besov else None
    rows = []
    cum_u3 = 0.0
    prev_n3 = _norm(model.grid, state.uh) ** 3
    mass = state.mass_defect()

    def record(st):
        row = compute_row(st, fam, rc.p_entropy_p, cum_u3)
        rows.append(row)
        if on_sample is not None:
            on_sample(st, row)

    record(state)
    total = n_steps(rc)
    for step in range(1, total + 1):
        try:
            new = coupled_step(state, rc.dt)
        except (BlowUpError, StepSizeError) as e:
            return RunResult(EXIT_FAIL, rows, state, mass, f"aborted at t={state.t:.6g}: {e}")
        n3 = _norm(model.grid, new.uh) ** 3
        cum_u3 += 0.5 * rc.dt * (prev_n3 + n3)
        prev_n3 = n3
        state = new
        mass = max(mass, state.mass_defect())
        if step % rc.sample_every == 0 or step == total:
            record(state)
    return RunResult(EXIT_OK, rows, state, mass)


def run_simulation(rc: RunConfig, out_dir) -> RunResult:
    """Write series.csv, checkpoint.bin and manifest.json under ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    res = simulate(rc)
    write_series(os.path.join(out_dir, "series.csv"), res.rows)
    name = "checkpoint.bin" if res.status == EXIT_OK else "checkpoint_last_good.bin"
    if res.state is not None:
        st = res.state
        save_checkpoint(os.path.join(out_dir, name), Checkpoint(rc, st.t, st.uh, st.cfg))
    write_manifest(os.path.join(out_dir, "manifest.json"), rc,
                   {"status": res.status, "message": res.message, "mass_defect": res.mass_defect,
                    "checkpoint": name, "samples": len(res.rows)})
    return res


def heat_baseline_rows(rc: RunConfig, uh0=None) -> list:
    """Linear heat flow of the initial velocity sampled like ``simulate``; other columns are zero."""
    grid = TorusGrid(rc.nx, rc.ny, rc.L)
    uh0 = fluid.leray_project(grid, initial_velocity(rc, grid) if uh0 is None else uh0)
    fam = dyadic_family(grid) if rc.besov else None
    spec = np.sum(np.abs(uh0) ** 2, axis=0)
    w = grid.cell_area / grid.npts

    def energy_at(t):
        return w * float(np.sum(spec * np.exp(-2.0 * rc.nu * t * grid.ksq)))

    rows = []
    total = n_steps(rc)
    cum_u3 = 0.0
    prev = energy_at(0.0) ** 1.5
    for step in range(total + 1):
        t = step * rc.dt
        if step:
            cur = energy_at(t) ** 1.5
            cum_u3 += 0.5 * rc.dt * (prev + cur)
            prev = cur
        if step % rc.sample_every and step != total:
            continue
        uh = fluid.heat_semigroup(grid, uh0, t, rc.nu)
        rows.append(DiagnosticsRow(
            t=t, energy_u=energy_at(t), enstrophy=fluid.enstrophy(grid, uh), entropy2=0.0,
            dissipation=0.0, entropy_p=0.0, tau_l2=0.0, tau_l1=0.0,
            besov_b011=besov_b011(uh, fam) if fam is not None and np.any(uh) else 0.0,
            splitting_integral=splitting_integral(grid, uh, t), l1lp_norm=0.0, cum_u3=cum_u3,
        ))
    return rows


def heat_baseline(rc: RunConfig, out_dir) -> RunResult:
    os.makedirs(out_dir, exist_ok=True)
    rows = heat_baseline_rows(rc)
    write_series(os.path.join(out_dir, "series.csv"), rows)
    write_manifest(os.path.join(out_dir, "manifest.json"), rc, {"mode": "heat-baseline", "samples": len(rows)})
    return RunResult(EXIT_OK, rows, None)
