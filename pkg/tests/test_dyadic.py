import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fene2d.analysis.dyadic import (
    DyadicRangeError,
    besov_b011,
    chi,
    dyadic_blocks,
    dyadic_family,
    l1_norm,
    lp_norm,
    phi,
)
from fene2d.fluid import TorusGrid


def _band_limited(grid, seed):
    rng = np.random.default_rng(seed)
    fh = grid.fft(rng.standard_normal((grid.nx, grid.ny))) * grid.dealias
    fh[0, 0] = 0.0
    return fh


def test_profiles():
    r = np.linspace(0, 5, 501)
    assert np.all(chi(r[r <= 0.75]) == 1.0) and np.all(chi(r[r >= 4 / 3]) == 0.0)
    assert np.all(phi(r) >= 0)
    assert np.all(phi(r[(r < 0.75) | (r > 8 / 3)]) == 0.0)
    # telescoping partition on r > 0
    rr = r[r > 0]
    total = sum(phi(rr * 2.0 ** -j) for j in range(-12, 8))
    np.testing.assert_allclose(total, 1.0, atol=1e-15)


def test_partition_and_range(grid32):
    fam = dyadic_family(grid32)
    assert fam.partition_error() < 1e-10 and fam.normalized_error() < 1e-12
    with pytest.raises(DyadicRangeError):
        dyadic_family(grid32, j_min=fam.j_min + 1)


def test_unit_mode_blocks(grid32):
    fam = dyadic_family(grid32)
    x1, _ = grid32.coords()
    blocks = dyadic_blocks(grid32.fft(np.cos(x1)), fam, physical=False)
    nonzero = [j for j, b in zip(fam.js, blocks) if np.max(np.abs(b)) > 1e-10 * 512]
    assert nonzero == [-1, 0]
    assert phi(np.array(2.0))[()] + phi(np.array(1.0))[()] == pytest.approx(1.0)


def test_zero_field(grid32):
    fam = dyadic_family(grid32)
    z = np.zeros((32, 32), complex)
    assert all(not np.any(b) for b in dyadic_blocks(z, fam))
    assert besov_b011(z, fam) == 0.0


def test_mean_rejected(grid32):
    fam = dyadic_family(grid32)
    with pytest.raises(ValueError):
        besov_b011(np.ones((32, 32), complex), fam)


@given(st.integers(0, 2 ** 31))
@settings(max_examples=15, deadline=None)
def test_reconstruction_and_embedding(seed):
    grid = TorusGrid(32, 32)
    fam = dyadic_family(grid)
    fh = _band_limited(grid, seed)
    rec = sum(dyadic_blocks(fh, fam, physical=False))
    assert math.sqrt(grid.l2sq(fh - rec) / grid.l2sq(fh)) < 1e-10
    assert besov_b011(fh, fam) >= l1_norm(grid, grid.to_physical(fh)) - 1e-8


def test_besov_of_cosine():
    grid = TorusGrid(16384, 8)
    x1, _ = grid.coords()
    assert besov_b011(grid.fft(np.cos(x1)), dyadic_family(grid)) == pytest.approx(8 * math.pi, abs=1e-6)


def test_lp_norms(grid32):
    f = np.ones((32, 32))
    assert l1_norm(grid32, f) == pytest.approx(4 * math.pi ** 2)
    assert lp_norm(grid32, f, 2) == pytest.approx(2 * math.pi)
    assert lp_norm(grid32, 3 * f, math.inf) == 3.0
    v = np.stack([3 * f, 4 * f])
    assert lp_norm(grid32, v, math.inf) == pytest.approx(5.0)
