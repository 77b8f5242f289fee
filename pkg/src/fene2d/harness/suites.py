"""Named verification suites.  Every check returns ``Check`` records; a suite
passes iff all its checks pass."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .. import fluid
from ..analysis import lemmas
from ..analysis.diagnostics import bootstrap_tracker, besov_apriori_check
from ..analysis.dyadic import besov_b011, dyadic_blocks, dyadic_family, l1_norm
from ..analysis.fits import decay_fit, exp_fit
from ..configspace import FeneParams, build_basis
from ..coupling import SimState, coupled_step, entropy_production, sigma
from ..fluid import TorusGrid
from ..fokker_planck import (
    assemble_operator,
    dissipation,
    drift_rate,
    entropy,
    fp_relax,
    gap_eigenvector,
    rotate,
    spectral_gap,
    stiffness_matrix,
)
from . import presets, runner
from .config import RunConfig
from .rng import SplitMix64


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


@dataclass
class MassLog:
    """Collects max |c_00(x)| over every run of a suite."""

    values: dict = field(default_factory=dict)

    def note(self, run: str, value: float):
        self.values[run] = max(float(value), self.values.get(run, 0.0))

    def check(self, tol: float = 1e-12) -> Check:
        worst = max(self.values.values(), default=0.0)
        return Check("mass conservation", worst < tol,
                     f"max |c00| = {worst:.2e} over {len(self.values)} runs (tol {tol:g})")


def _state(rc: RunConfig) -> SimState:
    return runner.initial_state(rc)


def _with_m1(state: SimState, amplitude: float = 0.05, scale: float = 1.0) -> SimState:
    """Add a lambda_1 eigenmode (angular mode 1) under a Gaussian envelope."""
    model = state.model
    vec, _, m = gap_eigenvector(model.basis)
    env = presets.m2_bump(model.grid, 2, 1, 1.0, scale)[2, 0].real
    cfg = state.cfg + amplitude * vec[:, :, None, None] * env
    return SimState(state.t, state.uh, cfg, model)


def _series(rows, name):
    return np.array([getattr(r, name) for r in rows], dtype=float)


# --- identities --------------------------------------------------------------------------


def check_rotation_unitarity(mass: MassLog, steps: int = 10) -> list:
    rc = RunConfig(nx=32, ny=32, n_r=6, dt=1e-3, g_preset="m2_bump", g_amplitude=0.1)
    st = _with_m1(_state(rc))
    grid = st.model.grid
    worst = 0.0
    for _ in range(steps):
        w = fluid.vorticity(grid, st.uh)
        e0 = entropy(st.cfg)
        e1 = entropy(rotate(st.cfg, w, 0.5 * rc.dt))
        worst = max(worst, float(np.max(np.abs(e1 - e0) / np.maximum(e0, 1e-300))))
        st = coupled_step(st, rc.dt)
        mass.note("rotation", st.mass_defect())
    return [Check("co-rotation unitarity", worst < 1e-13, f"max relative entropy change per rotate = {worst:.2e}")]


def check_drift_sign() -> list:
    basis = build_basis(FeneParams(1.0, 6, 3))
    rng = SplitMix64(11)
    c = lemmas.random_mean_zero(basis, 1, rng)[..., 0]
    omega = 0.7
    sig = np.array([[0.0, omega / 2], [-omega / 2, 0.0]])
    quad = drift_rate(basis, c, sig)
    phase = c * (1j * np.arange(basis.m_max + 1) * omega / 2)[:, None]
    err = float(np.max(np.abs(quad - phase)))
    return [Check("drift sign convention", err < 1e-10, f"|quadrature drift - phase rate| = {err:.2e}")]


def check_entropy_identity(dts=(1e-3, 5e-4, 2.5e-4, 1.25e-4), T: float = 0.1) -> list:
    basis = build_basis(FeneParams(1.0, 16, 2))
    rng = SplitMix64(2)
    c = np.zeros((3, 16, 4), dtype=complex)
    for m in range(3):
        A = stiffness_matrix(basis, m)
        lo = 1 if m == 0 else 0
        _, V = scipy.linalg.eigh(0.5 * (A + A.T)[lo:, lo:])
        w = rng.normal((4, 4)) + (1j * rng.normal((4, 4)) if m else 0.0)
        c[m, lo:] = V[:, :4] @ w
    res = []
    for dt in dts:
        op = assemble_operator(basis, dt)
        x = c
        E, D = [entropy(x)], [dissipation(x, op)]
        for _ in range(int(round(T / dt))):
            x = fp_relax(x, op, dt)
            E.append(entropy(x))
            D.append(dissipation(x, op))
        E, D = np.array(E), np.array(D)
        r = 0.5 * np.diff(E, axis=0) / dt + 0.5 * (D[1:] + D[:-1])
        res.append(float(np.max(np.abs(r))))
    order = math.log2(res[-2] / res[-1])
    return [Check("entropy identity order", order >= 1.9,
                  "residuals " + ", ".join(f"{r:.3e}" for r in res) + f"; order = {order:.3f}")]


def check_taylor_green(mass: MassLog) -> list:
    rc = RunConfig(nx=64, ny=64, dt=1e-3, t_end=1.0, sample_every=100, besov=False)
    res = runner.simulate(rc)
    mass.note("taylor_green", res.mass_defect)
    grid = res.state.model.grid
    exact = fluid.taylor_green(grid) * math.exp(-2.0 * res.state.t)
    err = math.sqrt(grid.l2sq(res.state.uh - exact))
    e = res.rows[-1].energy_u
    e_rel = abs(e - res.rows[0].energy_u * math.exp(-4.0)) / (res.rows[0].energy_u * math.exp(-4.0))
    return [
        Check("Taylor-Green L2 error", err < 1e-6 and res.status == 0, f"||u - u_exact|| at t=1: {err:.2e}"),
        Check("Taylor-Green energy law", e_rel < 1e-6, f"relative energy error vs exp(-4t): {e_rel:.2e}"),
    ]


def check_decoupling(mass: MassLog) -> list:
    out = []
    # equilibrium configuration: the coupled run must equal the bare fluid solver
    rc = RunConfig(nx=32, ny=32, n_r=4, dt=2e-3, t_end=0.1)
    st = _state(rc)
    uh = st.uh
    for _ in range(50):
        st = coupled_step(st, rc.dt)
        uh = fluid.ns_step(st.model.grid, uh, None, rc.dt)
    d = float(np.max(np.abs(st.uh - uh))) / float(np.max(np.abs(uh)))
    out.append(Check("decoupling: zero g", d < 1e-12, f"max relative difference = {d:.2e}"))
    # x-independent configuration with u = 0: pure Fokker-Planck, u stays 0
    rc = RunConfig(nx=16, ny=16, n_r=6, dt=2e-3, u_preset="zero")
    st = _state(rc)
    basis = st.model.basis
    c = lemmas.random_mean_zero(basis, 1, SplitMix64(5))[..., 0] * 0.1
    cfg = np.broadcast_to(c[:, :, None, None], st.cfg.shape).copy()
    st = SimState(0.0, st.uh, cfg, st.model)
    ref = c
    for _ in range(20):
        st = coupled_step(st, rc.dt)
        ref = fp_relax(ref, st.model.op, rc.dt)
        mass.note("decoupling", st.mass_defect())
    du = float(np.max(np.abs(st.uh)))
    dc = float(np.max(np.abs(st.cfg - ref[:, :, None, None])))
    out.append(Check("decoupling: uniform g", du < 1e-14 and dc < 1e-12,
                     f"max |u_hat| = {du:.1e}, max |c - c_FP| = {dc:.1e}"))
    return out


def check_energy_lyapunov(mass: MassLog) -> list:
    rc = RunConfig(nx=64, ny=64, L=8 * math.pi, n_r=4, dt=5e-3, t_end=2.0, sample_every=1,
                   u_preset="low_freq_random", amplitude=1.0, seed=3,
                   g_preset="m2_bump", g_amplitude=0.5, envelope_scale=2.0, besov=False)
    res = runner.simulate(rc)
    mass.note("energy_lyapunov", res.mass_defect)
    rows = res.rows
    t = _series(rows, "t")
    E = _series(rows, "energy_u")
    Z = _series(rows, "enstrophy")
    T2 = _series(rows, "tau_l2") ** 2
    S = _series(rows, "entropy2")
    dt = np.diff(t)
    lhs = np.diff(E) / dt + 0.5 * (Z[1:] + Z[:-1])
    rhs = 0.5 * (T2[1:] + T2[:-1])
    scale = float(np.max(Z + T2))
    excess = float(np.max((lhs - rhs) / scale))
    ok_a = excess <= float(dt.max()) and res.status == 0
    lam_star = None
    for i in range(rc.lyapunov_lambda_search_max + 1):
        lam = 2.0 ** i
        Lam = lam * S + E
        if np.all(np.diff(Lam) <= 1e-12 * Lam[0]):
            lam_star = lam
            break
    return [
        Check("energy inequality", ok_a, f"max (lhs - rhs)/scale = {excess:.2e} (slack dt = {dt.max():g})"),
        Check("Lyapunov functional", lam_star is not None,
              f"lambda* = {lam_star}" if lam_star else "no lambda <= 2^10 makes lambda*entropy + ||u||^2 monotone"),
    ]


# --- lemmas ------------------------------------------------------------------------------


def check_exp_decay(mass: MassLog) -> list:
    basis = build_basis(FeneParams(1.0, 8, 2))
    lam = spectral_gap(basis)
    vec, _, _ = gap_eigenvector(basis)
    op = assemble_operator(basis, 0.01)
    t, E, c = [0.0], [float(entropy(vec))], vec
    for n in range(1, 101):
        c = fp_relax(c, op, 0.01)
        t.append(0.01 * n)
        E.append(float(entropy(c)))
    fit = exp_fit(t, E, (0.0, 1.0))
    rel = abs(fit.rate - 2 * lam) / (2 * lam)
    out = [Check("entropy decay, eigenmode", rel < 0.02, f"rate = {fit.rate:.6f}, 2 lambda1 = {2 * lam:.6f}")]
    rc = RunConfig(nx=32, ny=32, n_r=6, dt=2e-3, t_end=1.0, sample_every=10, g_preset="m2_bump",
                   g_amplitude=0.1, besov=False)
    st = _with_m1(_state(rc))
    res = runner.simulate(rc, st)
    mass.note("exp_decay", res.mass_defect)
    fit = exp_fit(_series(res.rows, "t"), _series(res.rows, "entropy2"), (0.2, 1.0))
    lam6 = spectral_gap(st.model.basis)
    out.append(Check("entropy decay, coupled", fit.rate >= 2 * lam6 * 0.98 and res.status == 0,
                     f"rate = {fit.rate:.4f} >= 0.98 * 2 lambda1 = {2 * lam6 * 0.98:.4f}"))
    return out


def check_gap_convergence() -> list:
    out = []
    for k in (1.0, 2.0):
        a = spectral_gap(build_basis(FeneParams(k, 24, 2)))
        b = spectral_gap(build_basis(FeneParams(k, 32, 2)))
        rel = abs(a - b) / b
        out.append(Check(f"spectral gap convergence k={k:g}", rel < 1e-8,
                         f"lambda1(24) = {a:.12f}, lambda1(32) = {b:.12f}, rel = {rel:.1e}"))
    return out


def check_poincare() -> list:
    basis = build_basis(FeneParams(1.0, 12, 3))
    rep = lemmas.poincare_check(basis, trials=1000, seed=1)
    ok = rep["floor_ok"] and abs(rep["eigvec_ratio"] - rep["lambda1"]) < 1e-10 * rep["lambda1"]
    return [Check("Poincare floor", ok, f"min ratio {rep['min_ratio']:.6f} >= lambda1 {rep['lambda1']:.6f}; "
                  f"eigvec ratio {rep['eigvec_ratio']:.12f}")]


def check_besov(mass: MassLog) -> list:
    out = []
    errs = []
    for grid in (TorusGrid(64, 64), TorusGrid(512, 512, 4 * math.pi)):
        fam = dyadic_family(grid)
        errs.append(max(fam.partition_error(), fam.normalized_error()))
    out.append(Check("partition of unity", max(errs) < 1e-10, f"max error {max(errs):.1e}"))
    grid = TorusGrid(64, 64)
    fam = dyadic_family(grid)
    rng = SplitMix64(21)
    worst_rec, worst_emb = 0.0, math.inf
    for _ in range(100):
        f = rng.normal((64, 64))
        fh = grid.fft(f) * grid.dealias
        fh[0, 0] = 0.0
        blocks = dyadic_blocks(fh, fam, physical=False)
        rec = math.sqrt(grid.l2sq(fh - sum(blocks)) / grid.l2sq(fh))
        worst_rec = max(worst_rec, rec)
        worst_emb = min(worst_emb, besov_b011(fh, fam) / l1_norm(grid, grid.to_physical(fh)))
    out.append(Check("dyadic reconstruction", worst_rec < 1e-10, f"max relative error {worst_rec:.1e}"))
    out.append(Check("Besov embedding", worst_emb >= 1 - 1e-8, f"min besov / L1 = {worst_emb:.6f}"))
    g = TorusGrid(16384, 8)
    x1, _ = g.coords()
    val = besov_b011(g.fft(np.cos(x1)), dyadic_family(g))
    out.append(Check("Besov norm of cos x1", abs(val - 8 * math.pi) < 1e-6,
                     f"{val:.9f} vs 8 pi = {8 * math.pi:.9f}"))
    cs = []
    for n in (32, 64):
        rc = RunConfig(nx=n, ny=n, n_r=4, dt=2e-3, t_end=0.5, sample_every=5, u_preset="zero",
                       g_preset="m2_bump", g_amplitude=0.5, envelope_scale=0.8)
        res = runner.simulate(rc)
        mass.note(f"besov_{n}", res.mass_defect)
        rep = besov_apriori_check(res.rows)
        cs.append(rep["C_fit"] if rep["finite"] else math.nan)
    rel = abs(cs[1] - cs[0]) / cs[1] if cs[1] else math.inf
    out.append(Check("Besov a-priori constant", all(math.isfinite(c) for c in cs) and rel <= 0.10,
                     f"C(32^2) = {cs[0]:.5g}, C(64^2) = {cs[1]:.5g}, rel change {rel:.2%}"))
    return out


def check_p_entropy(mass: MassLog) -> list:
    rc = RunConfig(nx=32, ny=32, n_r=6, dt=2e-3, t_end=0.5, sample_every=5, g_preset="m2_bump",
                   g_amplitude=0.3, envelope_scale=1.0, p_entropy_p=4, besov=False)
    st = _with_m1(_state(rc), 0.1)
    res = runner.simulate(rc, st)
    mass.note("p_entropy", res.mass_defect)
    ep = _series(res.rows, "entropy_p")
    l1 = _series(res.rows, "l1lp_norm")
    inc = float(np.max(np.diff(ep) / ep[:-1]))
    inc_l1 = float(np.max(np.diff(l1) / l1[:-1]))
    out = [
        Check("p-entropy monotone (p=4)", inc <= 0.0, f"max relative increase {inc:.2e}"),
        Check("L1(L^p) norm monotone", inc_l1 <= 1e-8, f"max relative increase {inc_l1:.2e}"),
    ]
    cs = []
    for n_r in (8, 16):
        basis = build_basis(FeneParams(1.0, n_r, 2))
        samples = lemmas.random_smooth_config(basis, 100, SplitMix64(7))
        cs.append(lemmas.tau_bound_check(basis, samples, p=4)["C_l1"])
    rel = abs(cs[1] - cs[0]) / cs[1]
    out.append(Check("stress L1 bound constant", rel <= 0.05,
                     f"C(n_r=8) = {cs[0]:.5f}, C(n_r=16) = {cs[1]:.5f}, rel change {rel:.2%}"))
    return out


# --- Bernstein / heat ---------------------------------------------------------------------


def check_bernstein(trials: int = 100) -> list:
    grid = TorusGrid(512, 512, 4 * math.pi)
    reps = [lemmas.bernstein_check(grid, j, 2, math.inf, trials=trials, seed=0) for j in range(1, 6)]
    single = max(abs(r["single_mode_ratio"] - 1.0) for r in reps)
    out = [Check("single-mode derivative ratio", single < 1e-10, f"max |ratio / 2^j - 1| = {single:.1e}")]
    for key in ("grad_lo", "grad_hi", "bernstein_C"):
        vals = np.array([r[key] for r in reps])
        spread = float(np.max(np.abs(vals / vals.mean() - 1.0)))
        out.append(Check(f"Bernstein constant {key} stable in j", spread <= 0.10,
                         " ".join(f"{v:.4f}" for v in vals) + f"; spread {spread:.2%}"))
    heat = min(r["heat_c"] for r in reps)
    out.append(Check("annulus heat decay", heat >= 0.75 ** 2, f"min observed c = {heat:.4f} >= 0.5625"))
    rep = lemmas.lp_sum_check(grid)
    out.append(Check("heat-kernel dyadic sum", rep["rel_change"] <= 0.01,
                     f"sup = {rep['sup']:.6f}, widened = {rep['sup_widened']:.6f}, change {rep['rel_change']:.2%}"))
    return out


def check_heat() -> list:
    grid = TorusGrid(512, 512, 64 * math.pi)
    f = lemmas.gaussian_field(grid, 1.0)
    rep = lemmas.heat_lplq_check(grid, [f], 1, 2)
    target = (8 * math.pi) ** -0.5
    rel = abs(rep["final"] - target) / target
    out = [Check("heat (1,2) Gaussian constant", rel <= 0.01 and rep["sup"] <= target * 1.01,
                 f"{rep['final']:.6f} vs (8 pi)^-1/2 = {target:.6f} ({rel:.2%})")]
    rng = SplitMix64(9)
    fields = [grid.to_physical(grid.fft(rng.normal((512, 512))) * np.exp(-s * grid.ksq)) for s in (0.5, 4.0)]
    x1, _ = grid.coords()
    fields += [f, np.cos(x1)]
    times = np.concatenate([[0.5], np.logspace(0, math.log10(lemmas.whole_space_window(grid)[1]), 30)])
    rep = lemmas.heat_lplq_check(grid, fields, 2, 2, times=times, gradient=True)
    bound = (2 * math.e) ** -0.5
    out.append(Check("heat gradient (2,2) constant", rep["sup"] <= bound + 1e-3,
                     f"sup = {rep['sup']:.6f} <= (2e)^-1/2 + 1e-3 = {bound + 1e-3:.6f}"))
    rep = lemmas.heat_lplq_check(grid, fields[:3], 2, 2, times=np.concatenate([[0.0], times]))
    out.append(Check("heat (2,2) contraction", rep["sup"] <= 1.0 + 1e-12, f"sup = {rep['sup']:.12f}"))
    return out


# --- negative control --------------------------------------------------------------------


def check_negative_control(mass: MassLog) -> list:
    prod = {}
    for drag in ("full", "corotation"):
        rc = RunConfig(nx=32, ny=32, n_r=4, dt=1e-3, t_end=0.01, drag=drag, sample_every=10,
                       g_preset="m2_bump", g_amplitude=0.2, besov=False)
        st = _state(rc)
        grid = st.model.grid
        x1, x2 = grid.coords()
        shear = grid.fft(np.stack([np.sin(x2), np.zeros_like(x2)]))
        st = SimState(0.0, st.uh + shear, st.cfg, st.model)
        st = _with_m1(st, 0.1)
        res = runner.simulate(rc, st)
        mass.note(f"negative_{drag}", res.mass_defect)
        fin = res.state
        sig = sigma(grid, fin.uh, drag)
        prod[drag] = abs(grid.integral(entropy_production(fin.model.basis, fin.cfg, sig)))
    ok = prod["full"] > 100 * prod["corotation"]
    return [Check("negative control", ok,
                  f"|entropy production| full = {prod['full']:.3e}, co-rotation = {prod['corotation']:.3e}")]


# --- algebraic decay ---------------------------------------------------------------------


TIERS = {
    "reduced": dict(nx=256, L=64 * math.pi, band=(-0.70, -0.35)),
    "full": dict(nx=512, L=128 * math.pi, band=(-0.65, -0.40)),
}


def decay_config(tier: str = "reduced") -> RunConfig:
    t = TIERS[tier]
    return RunConfig(nx=t["nx"], ny=t["nx"], L=t["L"], n_r=2, dt=0.1, t_end=100.0, sample_every=5,
                     u_preset="low_freq_random", amplitude=1.0, seed=0, xi_cut=1.0,
                     g_preset="m2_bump", g_amplitude=0.05, envelope_scale=4.0, besov=False)


def check_algebraic_decay(mass: MassLog, tier: str = "reduced") -> list:
    rc = decay_config(tier)
    lo, hi = TIERS[tier]["band"]
    res = runner.simulate(rc)
    mass.note(f"decay_{tier}", res.mass_defect)
    t = _series(res.rows, "t")
    fit = decay_fit(t, np.sqrt(_series(res.rows, "energy_u")), (5.0, 100.0))
    heat = runner.heat_baseline_rows(rc)
    hfit = decay_fit(_series(heat, "t"), np.sqrt(_series(heat, "energy_u")), (5.0, 100.0))
    boot = bootstrap_tracker(res.rows)
    return [
        Check(f"velocity decay exponent ({tier})", lo <= fit.slope <= hi and fit.r2 >= 0.98 and res.status == 0,
              f"exponent {fit.slope:.4f} in [{lo}, {hi}], R^2 = {fit.r2:.5f}"),
        Check(f"heat baseline exponent ({tier})", abs(hfit.slope + 0.5) <= 0.05,
              f"exponent {hfit.slope:.4f} (|+0.5| <= 0.05), R^2 = {hfit.r2:.5f}"),
        Check(f"bootstrap ratios finite ({tier})", boot["finite"],
              f"max (int ||u||^3)^(1/3) (1+t)^(-1/12) = {boot['u3_ratio_max']:.4f}"),
    ]


# --- suite table -------------------------------------------------------------------------


def suite_identities(mass: MassLog):
    return (check_rotation_unitarity(mass) + check_drift_sign() + check_entropy_identity()
            + check_taylor_green(mass) + check_decoupling(mass) + check_energy_lyapunov(mass))


def suite_lemmas(mass: MassLog):
    return (check_gap_convergence() + check_poincare() + check_exp_decay(mass)
            + check_besov(mass) + check_p_entropy(mass))


SUITES = {
    "identities": suite_identities,
    "lemmas": suite_lemmas,
    "bernstein": lambda mass: check_bernstein(),
    "heat": lambda mass: check_heat(),
    "negative-control": check_negative_control,
    "decay": check_algebraic_decay,
}


def run_suite(name: str) -> list:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    mass = MassLog()
    checks = SUITES[name](mass)
    if mass.values:
        checks.append(mass.check())
    return checks
