"""Homogeneous Littlewood-Paley blocks and the B^0_{1,1} norm on the torus."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..fluid import TorusGrid

ANNULUS = (0.75, 8.0 / 3.0)


def _smooth_step(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def chi(r):
    """Low-frequency profile: 1 on [0, 3/4], 0 on [4/3, inf), C-infinity in between."""
    r = np.asarray(r, dtype=float)
    a = _smooth_step(4.0 / 3.0 - r)
    b = _smooth_step(r - 0.75)
    return a / (a + b)


def phi(r):
    """Annulus profile chi(r/2) - chi(r), supported in [3/4, 8/3]."""
    r = np.asarray(r, dtype=float)
    return chi(0.5 * r) - chi(r)


class DyadicRangeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DyadicFamily:
    grid: TorusGrid
    j_min: int
    j_max: int
    multipliers: np.ndarray = field(repr=False)  # (n_blocks, nx, ny)
    raw_sum: np.ndarray = field(repr=False)

    @property
    def js(self):
        return list(range(self.j_min, self.j_max + 1))

    def partition_error(self) -> float:
        """max over nonzero lattice xi of |sum_j phi(2^-j xi) - 1| before renormalisation."""
        nz = self.grid.ksq > 0
        return float(np.max(np.abs(self.raw_sum[nz] - 1.0)))

    def normalized_error(self) -> float:
        nz = self.grid.ksq > 0
        return float(np.max(np.abs(self.multipliers.sum(axis=0)[nz] - 1.0)))


def dyadic_family(grid: TorusGrid, j_min: int | None = None, j_max: int | None = None) -> DyadicFamily:
    kabs = np.sqrt(grid.ksq)
    nz = kabs > 0
    kmin, kmax = float(kabs[nz].min()), float(kabs.max())
    # chi(2^-j_min |xi|) = 0 needs |xi| >= (4/3) 2^j_min ; chi(2^-(j_max+1)|xi|) = 1 needs |xi| <= (3/4) 2^(j_max+1)
    need_lo = math.floor(math.log2(0.75 * kmin))
    need_hi = math.ceil(math.log2(kmax / 0.75)) - 1
    j_min = need_lo if j_min is None else j_min
    j_max = need_hi if j_max is None else j_max
    if j_min > need_lo or j_max < need_hi:
        raise DyadicRangeError(
            f"block range [{j_min}, {j_max}] does not cover the lattice; need [{need_lo}, {need_hi}]"
        )
    mult = np.stack([phi(kabs * 2.0 ** (-j)) for j in range(j_min, j_max + 1)])
    mult[:, ~nz] = 0.0
    total = mult.sum(axis=0)
    norm = np.where(nz, total, 1.0)
    return DyadicFamily(grid=grid, j_min=j_min, j_max=j_max, multipliers=mult / norm, raw_sum=total)


def _check_mean_free(grid: TorusGrid, fh, tol=1e-10):
    fh = np.asarray(fh)
    mean = np.abs(fh[..., 0, 0])
    scale = max(float(np.max(np.abs(fh))), 1e-300)
    if np.max(mean) > tol * scale:
        raise ValueError("homogeneous blocks need a mean-free field (xi = 0 coefficient nonzero)")


def dyadic_blocks(fh, fam: DyadicFamily, physical: bool = True):
    """List of blocks Delta_j f (nodal by default) for a spectral scalar or vector field."""
    _check_mean_free(fam.grid, fh)
    fh = np.asarray(fh)
    blocks = []
    for w in fam.multipliers:
        b = fh * w
        blocks.append(fam.grid.to_physical(b) if physical else b)
    return blocks


def _pointwise_norm(f):
    f = np.asarray(f)
    if f.ndim == 3:
        return np.sqrt(np.sum(f * f, axis=0))
    return np.abs(f)


def l1_norm(grid: TorusGrid, f) -> float:
    return grid.integral(_pointwise_norm(f))


def lp_norm(grid: TorusGrid, f, p) -> float:
    a = _pointwise_norm(f)
    if p == math.inf:
        return float(np.max(a))
    return (grid.cell_area * float(np.sum(a ** p))) ** (1.0 / p)


def besov_b011(fh, fam: DyadicFamily) -> float:
    """sum_j ||Delta_j f||_{L^1} (Euclidean norm pointwise for vector fields)."""
    grid = fam.grid
    _check_mean_free(grid, fh)
    fh = np.asarray(fh)
    total = 0.0
    for w in fam.multipliers:
        blk = fh * w
        if not np.any(blk):
            continue
        total += l1_norm(grid, grid.to_physical(blk))
    return total
