"""Initial data for velocity and configuration fields."""
from __future__ import annotations

import math

import numpy as np

from .. import fluid
from ..analysis.lemmas import gaussian_field
from ..fluid import TorusGrid
from .rng import SplitMix64


def taylor_green(grid: TorusGrid, amplitude: float = 1.0, wavenumber: int = 1):
    return fluid.taylor_green(grid, amplitude, wavenumber)


def low_freq_random(grid: TorusGrid, amplitude: float = 1.0, seed: int = 0, xi_cut: float = 1.0):
    """Random-phase divergence-free field with flat spectrum on 0 < |xi| <= xi_cut.

    Every lattice mode in the ball gets continuous-transform amplitude
    ``amplitude`` along xi_perp / |xi| with a random phase, so the velocity is
    divergence free by construction.  Phases are drawn from SplitMix64(seed)
    in the order of the modes of the half plane (n1 > 0, or n1 == 0 and n2 > 0)
    sorted by (n1, n2); the other half is filled by Hermitian symmetry.
    """
    n1 = np.rint(grid.k1 / grid.dk).astype(int)
    n2 = np.rint(grid.k2 / grid.dk).astype(int)
    ball = (grid.ksq > 0) & (grid.ksq <= xi_cut * xi_cut)
    if not np.any(ball):
        raise ValueError(f"no lattice modes with 0 < |xi| <= {xi_cut} (dk = {grid.dk:g})")
    if xi_cut > grid.kmax * 2.0 / 3.0:
        raise ValueError("xi_cut exceeds the dealiased band")
    upper = ball & ((n1 > 0) | ((n1 == 0) & (n2 > 0)))
    idx = np.argwhere(upper)
    order = np.lexsort((n2[upper], n1[upper]))
    idx = idx[order]
    phase = np.exp(2j * math.pi * SplitMix64(seed).uniform(len(idx)))
    uh = np.zeros((2, grid.nx, grid.ny), dtype=complex)
    scale = amplitude / grid.cell_area
    for (i, j), ph in zip(idx, phase):
        k1, k2 = grid.k1[i, j], grid.k2[i, j]
        kk = math.hypot(k1, k2)
        val = scale * ph * np.array([-k2, k1]) / kk
        uh[:, i, j] = val
        uh[:, (-i) % grid.nx, (-j) % grid.ny] = np.conj(val)
    return uh


def gaussian_velocity(grid: TorusGrid, amplitude: float = 1.0, width: float = 1.0):
    """Divergence-free vortex u = amplitude * curl-perp of a Gaussian stream function."""
    psi = amplitude * gaussian_field(grid, width) * 2 * math.pi * width * width
    ph = grid.fft(psi)
    uh = np.stack([1j * grid.k2 * ph, -1j * grid.k1 * ph])
    uh[:, 0, 0] = 0.0
    return uh


def m2_bump(grid: TorusGrid, m_max: int, n_r: int, amplitude: float = 0.1, envelope_scale: float = 1.0,
            center=None):
    """g coefficients: amplitude on (m, n) = (2, 0) times a periodic Gaussian envelope.

    The mass coefficient stays exactly zero, so every node keeps unit mass.
    """
    x1, x2 = grid.coords()
    c = (grid.L / 2, grid.L / 2) if center is None else center
    d1 = (x1 - c[0] + grid.L / 2) % grid.L - grid.L / 2
    d2 = (x2 - c[1] + grid.L / 2) % grid.L - grid.L / 2
    env = np.exp(-(d1 * d1 + d2 * d2) / (2.0 * envelope_scale ** 2))
    cfg = np.zeros((m_max + 1, n_r, grid.nx, grid.ny), dtype=complex)
    cfg[2, 0] = amplitude * env
    return cfg
