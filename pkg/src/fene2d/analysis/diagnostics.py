"""Monitored functionals of a coupled run and the proof-shaped trackers built on them."""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields

import numpy as np

from .. import fluid
from ..configspace import ConfigBasis
from ..coupling import SimState, stress_norms
from ..fluid import TorusGrid
from ..fokker_planck import dissipation, entropy, nodal_rule_size, nodal_values
from .dyadic import DyadicFamily, besov_b011


@dataclass(frozen=True)
class DiagnosticsRow:
    t: float
    energy_u: float
    enstrophy: float
    entropy2: float
    dissipation: float
    entropy_p: float
    tau_l2: float
    tau_l1: float
    besov_b011: float
    splitting_integral: float
    l1lp_norm: float
    cum_u3: float

    @classmethod
    def header(cls):
        return [f.name for f in fields(cls)]

    def values(self):
        return astuple(self)


def splitting_integral(grid: TorusGrid, uh, t: float) -> float:
    """Energy of u on the Fourier-splitting ball S(t) = {|xi|^2 <= 2 / (1 + t)}."""
    if t < 0:
        raise ValueError("splitting_integral needs t >= 0")
    sel = (grid.ksq > 0) & (grid.ksq <= 2.0 / (1.0 + t))
    return grid.cell_area * float(np.sum(np.abs(np.asarray(uh)[..., sel]) ** 2)) / grid.npts


def p_entropy(cfg, basis: ConfigBasis, p: int, grid: TorusGrid | None = None, chunk: int = 8192,
              n_s: int | None = None, n_theta: int | None = None):
    """Return (int int |g|^p psi_inf dR dx, int (int |g|^p psi_inf dR)^(1/p) dx).

    Without a grid the spatial integral is replaced by a plain sum over nodes
    (a single configuration gives the per-point values).
    """
    if p < 2 or int(p) != p or p % 2:
        raise ValueError(f"p_entropy supports even integers p >= 2, got {p}")
    p = int(p)
    need_s, need_th = nodal_rule_size(basis, p)
    if n_s is not None and (n_s < need_s or n_theta < need_th):
        raise ValueError(f"quadrature ({n_s}, {n_theta}) too small for |g|^{p}; need ({need_s}, {need_th})")
    n_s, n_theta = need_s, need_th
    cfg = np.asarray(cfg)
    flat = cfg.reshape(cfg.shape[:2] + (-1,))
    npts = flat.shape[-1]
    dens = np.empty(npts)
    for lo in range(0, npts, chunk):
        hi = min(npts, lo + chunk)
        if not np.any(flat[..., lo:hi]):
            dens[lo:hi] = 0.0
            continue
        q, g = nodal_values(basis, flat[..., lo:hi], n_s, n_theta)
        dens[lo:hi] = (g ** p) @ q.weights
    dens = np.maximum(dens, 0.0)
    w = grid.cell_area if grid is not None else 1.0
    return w * float(dens.sum()), w * float(np.sum(dens ** (1.0 / p)))


def compute_row(state: SimState, fam: DyadicFamily | None, p: int, cum_u3: float) -> DiagnosticsRow:
    """One sample of every monitored functional; ``fam=None`` skips the Besov norm."""
    model = state.model
    grid = model.grid
    uh, cfg = state.uh, state.cfg
    tau = model.stress(cfg)
    tau_l2, tau_l1 = stress_norms(grid, tau)
    if p:
        ep, l1lp = p_entropy(cfg, model.basis, p, grid)
    else:
        ep, l1lp = 0.0, 0.0
    return DiagnosticsRow(
        t=float(state.t),
        energy_u=fluid.energy(grid, uh),
        enstrophy=fluid.enstrophy(grid, uh),
        entropy2=grid.integral(entropy(cfg)),
        dissipation=grid.integral(dissipation(cfg, model.op)),
        entropy_p=ep,
        tau_l2=tau_l2,
        tau_l1=tau_l1,
        besov_b011=besov_b011(uh, fam) if fam is not None and np.any(uh) else 0.0,
        splitting_integral=splitting_integral(grid, uh, state.t),
        l1lp_norm=l1lp,
        cum_u3=float(cum_u3),
    )


def _column(rows, name):
    return np.array([getattr(r, name) for r in rows], dtype=float)


def _cumtrapz(t, y):
    out = np.zeros_like(y)
    if len(y) > 1:
        out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t))
    return out


class DuhamelMonitor:
    """Tracks the low-frequency Duhamel majorant of |u_hat| on S(t).

    Accumulates, per lattice mode in S(0), the time integral of |tau_hat|^2
    and globally the integral of ||u||^2, so that at any time

        e^{-t|xi|^2} |u0_hat| + |xi| int ||u||^2 + |xi| t^(1/2) (int |tau_hat|^2)^(1/2)

    can be compared with |u_hat(xi)| (continuous-transform normalisation).
    """

    def __init__(self, grid: TorusGrid, uh0):
        self.grid = grid
        self.sel = (grid.ksq > 0) & (grid.ksq <= 2.0)
        self.xi = np.sqrt(grid.ksq[self.sel])
        self.scale = grid.cell_area
        self.u0 = np.sqrt(np.sum(np.abs(np.asarray(uh0)[:, self.sel]) ** 2, axis=0)) * self.scale
        self.int_u2 = 0.0
        self.int_tau2 = np.zeros_like(self.xi)
        self._last = None
        self.records = []

    def _tau_hat_sq(self, tau):
        th = self.grid.fft(np.stack(tau))[:, self.sel] * self.scale
        t11, t12, t22 = th
        return np.abs(t11) ** 2 + 2 * np.abs(t12) ** 2 + np.abs(t22) ** 2

    def update(self, t, uh, tau):
        cur = (t, fluid.energy(self.grid, uh), self._tau_hat_sq(tau))
        if self._last is not None:
            dt = t - self._last[0]
            self.int_u2 += 0.5 * dt * (cur[1] + self._last[1])
            self.int_tau2 += 0.5 * dt * (cur[2] + self._last[2])
        self._last = cur

    def sample(self, t, uh):
        in_s = self.xi ** 2 <= 2.0 / (1.0 + t)
        if not np.any(in_s):
            self.records.append((t, 0.0, 0.0))
            return
        uhat = np.sqrt(np.sum(np.abs(np.asarray(uh)[:, self.sel]) ** 2, axis=0)) * self.scale
        major = (np.exp(-t * self.xi ** 2) * self.u0 + self.xi * self.int_u2
                 + self.xi * math.sqrt(t) * np.sqrt(self.int_tau2))
        self.records.append((t, float(uhat[in_s].max()), float(major[in_s].max())))


def bootstrap_tracker(rows, monitor: DuhamelMonitor | None = None, transient: float = 1.0) -> dict:
    """Report the bounded ratios the decay argument tracks (no assertions)."""
    t = _column(rows, "t")
    cum_u3 = _column(rows, "cum_u3")
    split = _column(rows, "splitting_integral")
    diss = _column(rows, "dissipation")
    ratio_u3 = np.cbrt(cum_u3) / (1.0 + t) ** (1.0 / 12.0)
    cum_diss = _cumtrapz(t, diss)
    ratio_split = split / ((1.0 + t) ** -0.5 + cum_diss)
    late = t >= transient
    report = {
        "t": t,
        "u3_ratio": ratio_u3,
        "split_ratio": ratio_split,
        "u3_ratio_max": float(ratio_u3.max()) if t.size else 0.0,
        "split_ratio_max": float(ratio_split.max()) if t.size else 0.0,
        "u3_ratio_nonincreasing_late": bool(np.all(np.diff(ratio_u3[late]) <= 1e-12 * max(1.0, ratio_u3.max())))
        if np.count_nonzero(late) > 1 else True,
    }
    if monitor is not None and monitor.records:
        rec = np.array(monitor.records)
        with np.errstate(invalid="ignore", divide="ignore"):
            r = np.where(rec[:, 2] > 0, rec[:, 1] / rec[:, 2], 0.0)
        report["duhamel_ratio"] = r
        report["duhamel_ratio_max"] = float(r.max())
    report["finite"] = bool(np.all(np.isfinite(ratio_u3)) and np.all(np.isfinite(ratio_split)))
    return report


def besov_apriori_check(rows) -> dict:
    """Fit the smallest C with sup_[0,T] ||u||_B <= ||u0||_B + C sqrt(T) M(T) at every sample T.

    M(T) = ||u0||^2 + int_0^T ||tau||_2^2 + sup_[0,T] ||tau||_1.
    """
    t = _column(rows, "t")
    b = _column(rows, "besov_b011")
    e0 = rows[0].energy_u
    tau2 = _column(rows, "tau_l2") ** 2
    tau1 = _column(rows, "tau_l1")
    sup_b = np.maximum.accumulate(b)
    M = e0 + _cumtrapz(t, tau2) + np.maximum.accumulate(tau1)
    excess = sup_b - b[0]
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.where((t > 0) & (M > 0), excess / (np.sqrt(t) * M), 0.0)
    c = np.where(np.isfinite(c), c, 0.0)
    C = float(max(c.max(), 0.0)) if c.size else 0.0
    return {
        "sup_besov": float(sup_b[-1]) if sup_b.size else 0.0,
        "besov_u0": float(b[0]) if b.size else 0.0,
        "C_fit": C,
        "finite": bool(np.all(np.isfinite(sup_b)) and math.isfinite(C)),
        "C_series": c,
    }
