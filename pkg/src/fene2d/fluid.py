"""Pseudo-spectral incompressible Navier-Stokes on the periodic square [0, L)^2.

Spectral arrays follow the unnormalised forward FFT convention
(``U_k = sum_x u(x) exp(-i k.x)``); axis 0 is x1 and axis 1 is x2.  Vector
fields carry their component index first: ``uh.shape == (2, nx, ny)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft


class StepSizeError(ValueError):
    pass


class BlowUpError(FloatingPointError):
    pass


FFT_WORKERS = -1


@dataclass(frozen=True, eq=False)
class TorusGrid:
    nx: int = 64
    ny: int = 64
    L: float = 2.0 * math.pi
    k1: np.ndarray = field(init=False, repr=False)
    k2: np.ndarray = field(init=False, repr=False)
    ksq: np.ndarray = field(init=False, repr=False)
    dealias: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        for n in (self.nx, self.ny):
            if n < 8 or n & (n - 1):
                raise ValueError(f"grid sizes must be powers of two >= 8, got {n}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ValueError(f"torus period must be positive, got {self.L}")
        n1 = np.fft.fftfreq(self.nx, 1.0 / self.nx)
        n2 = np.fft.fftfreq(self.ny, 1.0 / self.ny)
        dk = 2.0 * math.pi / self.L
        k1 = (dk * n1)[:, None] * np.ones((1, self.ny))
        k2 = np.ones((self.nx, 1)) * (dk * n2)[None, :]
        mask = (np.abs(n1)[:, None] <= self.nx / 3.0) & (np.abs(n2)[None, :] <= self.ny / 3.0)
        object.__setattr__(self, "k1", k1)
        object.__setattr__(self, "k2", k2)
        object.__setattr__(self, "ksq", k1 * k1 + k2 * k2)
        object.__setattr__(self, "dealias", mask)

    @property
    def dk(self) -> float:
        return 2.0 * math.pi / self.L

    @property
    def cell_area(self) -> float:
        return self.L * self.L / (self.nx * self.ny)

    @property
    def kmax(self) -> float:
        return self.dk * max(self.nx, self.ny) / 2.0

    @property
    def npts(self) -> int:
        return self.nx * self.ny

    def coords(self):
        x1 = self.L * np.arange(self.nx) / self.nx
        x2 = self.L * np.arange(self.ny) / self.ny
        return np.meshgrid(x1, x2, indexing="ij")

    def fft(self, f):
        return scipy.fft.fft2(f, axes=(-2, -1), workers=FFT_WORKERS)

    def ifft(self, fh):
        return scipy.fft.ifft2(fh, axes=(-2, -1), workers=FFT_WORKERS)

    def to_physical(self, fh):
        return self.ifft(fh).real

    def l2sq(self, fh) -> float:
        """Physical ``int |f|^2 dx`` from a spectral array (summed over leading axes)."""
        return self.cell_area * float(np.sum(np.abs(fh) ** 2)) / self.npts

    def l2sq_nodal(self, f) -> float:
        return self.cell_area * float(np.sum(np.abs(f) ** 2))

    def integral(self, f) -> float:
        return self.cell_area * float(np.sum(f))


def leray_project(grid: TorusGrid, fh):
    """Apply (I - xi xi^T / |xi|^2) modewise; the xi = 0 mode is zeroed."""
    fh = np.asarray(fh)
    with np.errstate(invalid="ignore", divide="ignore"):
        inv = np.where(grid.ksq > 0, 1.0 / np.where(grid.ksq > 0, grid.ksq, 1.0), 0.0)
    dot = grid.k1 * fh[0] + grid.k2 * fh[1]
    out = np.empty_like(fh, dtype=complex)
    out[0] = fh[0] - grid.k1 * dot * inv
    out[1] = fh[1] - grid.k2 * dot * inv
    out[:, 0, 0] = 0.0
    return out


def divergence_hat(grid: TorusGrid, fh):
    return 1j * (grid.k1 * fh[0] + grid.k2 * fh[1])


def heat_semigroup(grid: TorusGrid, fh, t: float, nu: float = 1.0):
    if t < 0:
        raise ValueError("heat semigroup needs t >= 0")
    return np.asarray(fh) * np.exp(-nu * t * grid.ksq)


def vorticity(grid: TorusGrid, uh):
    """Nodal omega = d1 u2 - d2 u1."""
    return grid.to_physical(1j * (grid.k1 * uh[1] - grid.k2 * uh[0]))


def velocity_gradient(grid: TorusGrid, uh):
    """Nodal tensor G[i, j] = d_i u_j."""
    ks = (grid.k1, grid.k2)
    G = np.empty((2, 2, grid.nx, grid.ny))
    for i in range(2):
        for j in range(2):
            G[i, j] = grid.to_physical(1j * ks[i] * uh[j])
    return G


def energy(grid: TorusGrid, uh) -> float:
    """||u||_{L^2}^2."""
    return grid.l2sq(uh)


def enstrophy(grid: TorusGrid, uh) -> float:
    """||grad u||_{L^2}^2."""
    return grid.cell_area * float(np.sum(grid.ksq * np.abs(uh) ** 2)) / grid.npts


def max_divergence(grid: TorusGrid, uh) -> float:
    """max over xi != 0 of |xi . u_hat| / |xi|, relative to max |u_hat|."""
    mag = np.sqrt(np.abs(uh[0]) ** 2 + np.abs(uh[1]) ** 2)
    scale = float(np.max(mag))
    if scale == 0.0:
        return 0.0
    d = np.abs(grid.k1 * uh[0] + grid.k2 * uh[1]) / np.sqrt(np.where(grid.ksq > 0, grid.ksq, 1.0))
    return float(np.max(d)) / scale


def advection_hat(grid: TorusGrid, uh, u=None):
    """Dealiased spectral u.grad u = div(u (x) u); the mask truncates the product."""
    if u is None:
        u = grid.to_physical(uh)
    prod = grid.fft(np.stack([u[0] * u[0], u[0] * u[1], u[1] * u[1]]))
    ik1, ik2 = 1j * grid.k1, 1j * grid.k2
    out = np.empty((2, grid.nx, grid.ny), dtype=complex)
    out[0] = ik1 * prod[0] + ik2 * prod[1]
    out[1] = ik1 * prod[1] + ik2 * prod[2]
    return out * grid.dealias


def check_cfl(grid: TorusGrid, u, dt: float, limit: float = 0.5):
    umax = float(np.max(np.sqrt(u[0] ** 2 + u[1] ** 2))) if np.size(u) else 0.0
    cfl = dt * umax * grid.kmax
    if cfl > limit:
        raise StepSizeError(f"CFL number {cfl:.3f} exceeds {limit} (dt={dt}, max|u|={umax:.3e})")
    return cfl


def ns_rhs(grid: TorusGrid, uh, stress_div_hat=None, advection: bool = True):
    """Projected explicit part: -P(u.grad u) + P(div tau)."""
    rhs = np.zeros_like(uh, dtype=complex)
    if advection:
        rhs -= advection_hat(grid, uh)
    if stress_div_hat is not None:
        rhs += stress_div_hat
    return leray_project(grid, rhs)


def ns_step(grid: TorusGrid, uh, stress_div_hat, dt: float, nu: float = 1.0,
            advection: bool = True, check: bool = True):
    """One integrating-factor Heun step; diffusion is integrated exactly."""
    if check:
        check_cfl(grid, grid.to_physical(uh), dt)
    E = np.exp(-nu * dt * grid.ksq)
    k1 = ns_rhs(grid, uh, stress_div_hat, advection)
    u_pred = E * (uh + dt * k1)
    k2 = ns_rhs(grid, u_pred, stress_div_hat, advection)
    out = E * (uh + 0.5 * dt * k1) + 0.5 * dt * k2
    out[:, 0, 0] = 0.0
    if not np.all(np.isfinite(out)):
        raise BlowUpError("non-finite velocity after ns_step")
    return out


def stress_divergence_hat(grid: TorusGrid, tau):
    """Spectral (div tau)_j = d_i tau_ij from nodal components (t11, t12, t22)."""
    t11, t12, t22 = grid.fft(np.stack(tau))
    ik1, ik2 = 1j * grid.k1, 1j * grid.k2
    return np.stack([ik1 * t11 + ik2 * t12, ik1 * t12 + ik2 * t22])


def taylor_green(grid: TorusGrid, amplitude: float = 1.0, wavenumber: int = 1):
    x1, x2 = grid.coords()
    a = wavenumber * grid.dk
    u = amplitude * np.stack([np.sin(a * x1) * np.cos(a * x2), -np.cos(a * x1) * np.sin(a * x2)])
    return grid.fft(u)
