"""Report-generating checkers for the functional inequalities the decay proof relies on.

Each checker measures empirical constants on concrete data and returns a
plain dict.  Pass/fail thresholds live with the caller.
"""
from __future__ import annotations

import math

import numpy as np
import scipy.fft

from ..configspace import ConfigBasis, project
from ..coupling import stress, stress_table
from ..fluid import TorusGrid
from ..fokker_planck import assemble_operator, dissipation, entropy, gap_eigenvector, spectral_gap
from ..harness.rng import SplitMix64
from .diagnostics import p_entropy
from .dyadic import dyadic_family, lp_norm, phi


# --- Bernstein inequalities and the heat-kernel sum -----------------------------------


def _poly2(rng: SplitMix64):
    c = rng.normal(6)
    return lambda a, b: c[0] + c[1] * a + c[2] * b + c[3] * a * a + c[4] * a * b + c[5] * b * b


def annulus_packet(grid: TorusGrid, lam: float, rng: SplitMix64, profile=None):
    """Random real field with spectrum in lam * {3/4 <= |xi| <= 8/3}.

    u_hat(xi) = phi(|xi|/lam) rho(xi/lam) exp(-i xi.x0) with rho a random
    quadratic; the construction is scale-covariant in lam, so the ratios the
    Bernstein checks measure do not depend on lam except through the lattice.
    """
    rho = _poly2(rng)
    x0 = rng.uniform(2) * grid.L
    a, b = grid.k1 / lam, grid.k2 / lam
    if profile is None:
        profile = phi(np.sqrt(a * a + b * b))
    w = profile * rho(a, b)
    e1 = np.exp(-1j * grid.k1[:, 0] * x0[0])
    e2 = np.exp(-1j * grid.k2[0, :] * x0[1])
    fh = w * e1[:, None] * e2[None, :]
    # Hermitian part: keeps the (radial) annulus support and makes u real
    mirror = np.roll(np.flip(fh, axis=(0, 1)), 1, axis=(0, 1))
    return 0.5 * (fh + np.conj(mirror))


def _real(grid: TorusGrid, fh):
    # Hermitian input: the half-spectrum inverse is exact and half the cost
    half = grid.ny // 2 + 1
    return scipy.fft.irfft2(fh[..., :half], s=(grid.nx, grid.ny), axes=(-2, -1), workers=-1)


def _grad_norm(grid: TorusGrid, fh, p):
    g = _real(grid, np.stack([1j * grid.k1 * fh, 1j * grid.k2 * fh]))
    return lp_norm(grid, g, p)


def single_mode_ratio(grid: TorusGrid, j: int, p) -> float:
    """||grad u||_p / ||u||_p for u = cos(2^j x1); exactly 2^j on a resolving grid."""
    x1, _ = grid.coords()
    fh = grid.fft(np.cos(2.0 ** j * x1))
    return _grad_norm(grid, fh, p) / lp_norm(grid, grid.to_physical(fh), p)


def bernstein_check(grid: TorusGrid, j: int, p=2, q=math.inf, trials: int = 100, seed: int = 0) -> dict:
    """Empirical Bernstein and heat-decay constants for random fields in the annulus 2^j C."""
    if not p <= q:
        raise ValueError("bernstein_check needs p <= q")
    lam = 2.0 ** j
    if (8.0 / 3.0) * lam > grid.kmax:
        raise ValueError(f"annulus at j={j} exceeds the band of the grid")
    if 0.75 * lam < 2 * grid.dk:
        raise ValueError(f"annulus at j={j} is not resolved by the lattice spacing")
    rng = SplitMix64(seed)
    grad, bern, heat = [], [], []
    t = lam ** -2
    profile = phi(np.sqrt(grid.ksq) / lam)
    damp = np.exp(-t * grid.ksq)
    for _ in range(trials):
        fh = annulus_packet(grid, lam, rng, profile)
        f = _real(grid, fh)
        np_ = lp_norm(grid, f, p)
        grad.append(_grad_norm(grid, fh, p) / (lam * np_))
        bern.append(lp_norm(grid, f, q) / (lam ** (2.0 * (1.0 / p - (0.0 if q == math.inf else 1.0 / q))) * np_))
        hf = _real(grid, fh * damp)
        heat.append(lp_norm(grid, hf, p) / np_)
    grad, bern, heat = map(np.asarray, (grad, bern, heat))
    return {
        "j": j,
        "lambda": lam,
        "single_mode_ratio": single_mode_ratio(grid, j, p) / lam,
        "grad_lo": float(grad.min()),
        "grad_hi": float(grad.max()),
        "bernstein_C": float(bern.max()),
        "heat_ratio_max": float(heat.max()),
        "heat_c": float(-np.log(heat.max())),
    }


def lp_sum_sup(j_min: int, j_max: int, s: float = 0.5, c: float = 1.0, n_t: int = 4001) -> float:
    """sup over t of sum_{j_min..j_max} t^s 2^(2js) exp(-c t 2^(2j)).

    t is scanned on a log grid spanning two octaves beyond the block range on
    either side, which brackets the maximiser.
    """
    js = np.arange(j_min, j_max + 1, dtype=float)
    t = np.logspace(-2.0 * (j_max + 2) * math.log10(2.0), -2.0 * (j_min - 2) * math.log10(2.0), n_t)
    terms = (t[:, None] * 4.0 ** js[None, :]) ** s * np.exp(-c * t[:, None] * 4.0 ** js[None, :])
    return float(terms.sum(axis=1).max())


def lp_sum_check(grid: TorusGrid, s: float = 0.5, c: float = 1.0, widen: int = 2) -> dict:
    fam = dyadic_family(grid)
    base = lp_sum_sup(fam.j_min, fam.j_max, s, c)
    wide = lp_sum_sup(fam.j_min - widen, fam.j_max + widen, s, c)
    return {"j_range": (fam.j_min, fam.j_max), "sup": base, "sup_widened": wide,
            "rel_change": abs(wide - base) / base}


# --- heat semigroup (Lp, Lq) ------------------------------------------------------------


def gaussian_field(grid: TorusGrid, width: float = 1.0, center=None):
    """Unit-mass periodic Gaussian exp(-|x - c|^2 / (2 width^2)) / (2 pi width^2)."""
    x1, x2 = grid.coords()
    c = (grid.L / 2, grid.L / 2) if center is None else center
    d1 = (x1 - c[0] + grid.L / 2) % grid.L - grid.L / 2
    d2 = (x2 - c[1] + grid.L / 2) % grid.L - grid.L / 2
    return np.exp(-(d1 * d1 + d2 * d2) / (2 * width * width)) / (2 * math.pi * width * width)


def whole_space_window(grid: TorusGrid, t_min: float = 1.0) -> tuple:
    t_max = (grid.L / (2 * math.pi)) ** 2 / 10.0
    if t_max <= t_min:
        raise ValueError(f"torus too small for a whole-space window above t={t_min}")
    return t_min, t_max


def heat_lplq_check(grid: TorusGrid, fields, p=1, q=2, times=None, gradient: bool = False) -> dict:
    """sup over t and fields of t^{(1/p - 1/q) (+1/2)} ||e^{t Lap} (grad) f||_q / ||f||_p.

    ``fields`` are nodal scalars; ``times`` defaults to 60 log-spaced points in
    the whole-space window.
    """
    if not (1 <= p <= q):
        raise ValueError("heat_lplq_check needs 1 <= p <= q")
    if times is None:
        t0, t1 = whole_space_window(grid)
        times = np.logspace(math.log10(t0), math.log10(t1), 60)
    times = np.asarray(times, dtype=float)
    expo = (1.0 / p - (0.0 if q == math.inf else 1.0 / q)) + (0.5 if gradient else 0.0)
    curves = []
    for f in fields:
        fh = grid.fft(f)
        fh[0, 0] = fh[0, 0] if not gradient else 0.0
        norm_p = lp_norm(grid, f, p)
        row = []
        for t in times:
            h = fh * np.exp(-t * grid.ksq)
            if gradient:
                v = np.stack([grid.to_physical(1j * grid.k1 * h), grid.to_physical(1j * grid.k2 * h)])
            else:
                v = grid.to_physical(h)
            row.append(t ** expo * lp_norm(grid, v, q) / norm_p)
        curves.append(row)
    curves = np.asarray(curves)
    return {"times": times, "curves": curves, "sup": float(curves.max()),
            "final": float(curves[:, -1].max())}


# --- configuration-space inequalities ---------------------------------------------------


def random_mean_zero(basis: ConfigBasis, trials: int, rng: SplitMix64):
    """Random half-stored coefficient vectors with c[0, 0] = 0 (shape (M+1, n_r, trials))."""
    shape = (basis.m_max + 1, basis.n_r, trials)
    c = rng.normal(shape) + 1j * rng.normal(shape)
    c[0] = c[0].real
    c[0, 0] = 0.0
    return c


def poincare_check(basis: ConfigBasis, trials: int = 1000, seed: int = 0, samples=None) -> dict:
    lam = spectral_gap(basis)
    op = assemble_operator(basis)
    if samples is None:
        samples = random_mean_zero(basis, trials, SplitMix64(seed))
    samples = np.asarray(samples)
    if samples.ndim == 2:
        samples = samples[..., None]
    if np.max(np.abs(samples[0, 0])) > 1e-14 * max(1.0, float(np.max(np.abs(samples)))):
        raise ValueError("poincare_check needs mean-zero g (the constant coefficient must vanish)")
    ratio = dissipation(samples, op) / entropy(samples)
    vec, _, _ = gap_eigenvector(basis)
    eig_ratio = float(dissipation(vec, op) / entropy(vec))
    return {"lambda1": lam, "min_ratio": float(ratio.min()), "eigvec_ratio": eig_ratio,
            "floor_ok": bool(ratio.min() >= lam * (1 - 1e-8))}


def random_smooth_config(basis: ConfigBasis, trials: int, rng: SplitMix64, modes=(0, 2)):
    """Projections of random smooth non-polynomial g onto the basis, mean removed.

    g(R) = sum over the requested angular modes of exp(a s) cos(m theta + phase)
    style profiles; refining n_r converges to the same underlying functions.
    """
    params = rng.uniform((trials, len(modes), 3))
    amps = rng.normal((trials, len(modes)))

    def func(R1, R2):
        s = R1 * R1 + R2 * R2
        th = np.arctan2(R2, R1)
        out = []
        for t in range(trials):
            g = np.zeros_like(s)
            for i, m in enumerate(modes):
                a, b, ph = params[t, i]
                prof = np.exp((2 * a - 1) * 2 * s) / (1.0 + b * s)
                g = g + amps[t, i] * prof * np.cos(m * th + 2 * math.pi * ph)
            out.append(g)
        return np.stack(out)

    c = project(basis, func)
    # project returns (M+1, n_r, trials); drop the mass mode
    c[0, 0] = 0.0
    return c


def tau_bound_check(basis: ConfigBasis, samples, p: int = 2, eps=(0.1, 1.0)) -> dict:
    """Empirical constants for the pointwise stress bounds.

    samples: half-stored coefficients (M+1, n_r, trials).
    """
    if p * basis.k <= 1:
        raise ValueError(f"the L1 stress bound needs p*k > 1, got p={p}, k={basis.k}")
    samples = np.asarray(samples)
    op = assemble_operator(basis)
    t11, t12, t22 = stress(samples, stress_table(basis))
    tau_sq = t11 ** 2 + 2 * t12 ** 2 + t22 ** 2
    E = entropy(samples)
    D = dissipation(samples, op)
    nz = E > 0
    if not np.any(nz):
        return {"C_geometric": 0.0, "C_eps": {e: 0.0 for e in eps}, "C_l1": 0.0, "trials": samples.shape[-1]}
    C_geo = float(np.max(tau_sq[nz] / np.sqrt(E[nz] * D[nz])))
    C_eps = {e: float(max(0.0, np.max((tau_sq[nz] - e * D[nz]) / E[nz]))) for e in eps}
    lp = np.array([p_entropy(samples[..., i:i + 1], basis, p)[1] for i in range(samples.shape[-1])])
    C_l1 = float(np.max(np.sqrt(tau_sq[nz]) / lp[nz]))
    return {"C_geometric": C_geo, "C_eps": C_eps, "C_l1": C_l1, "trials": int(samples.shape[-1])}
