"""Configuration-space dynamics for the relative density g = (psi - psi_inf) / psi_inf.

Coefficient arrays use *half storage*: shape ``(m_max + 1, n_r, ...)`` with
``c[m, n]`` the coefficient of ``b_{m,n}`` for ``m >= 0``; the ``m < 0`` half
is ``conj(c[|m|, n])`` and is never stored, so Hermitian symmetry holds by
construction.  Trailing axes are spatial grid axes (or absent for a single
configuration).  ``c[0]`` is real.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from .configspace import ConfigBasis, disk_quadrature


class OperatorAssemblyError(RuntimeError):
    pass


class EigensolverError(RuntimeError):
    pass


def stiffness_matrix(basis: ConfigBasis, m: int) -> np.ndarray:
    """A_m[n, n'] = <grad b_{m,n}, grad b_{m,n'}>_{psi_inf} by exact quadrature."""
    m = abs(m)
    k = basis.k
    rule = basis.stiff_rules[m]
    s = rule.nodes
    p, dp = basis.P_stiff[m], basis.dP_stiff[m]
    if m == 0:
        # |grad f|^2 = 4 s (p')^2 ; rule weight is (1-s)^k
        return (k + 1.0) * 4.0 * (dp * s * rule.weights) @ dp.T
    # weight (1-s)^k s^(m-1) absorbs the r^(2m-2) factor
    G = m * p + 2.0 * s * dp
    return (k + 1.0) * ((G * rule.weights) @ G.T + m * m * (p * rule.weights) @ p.T)


@dataclass
class FpOperator:
    basis: ConfigBasis
    A: tuple
    dt: float
    scheme: str = "exact"
    _eig: tuple = field(default=(), repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    def propagators(self, dt: float, scheme: str | None = None) -> tuple:
        scheme = scheme or self.scheme
        key = (float(dt), scheme)
        if key not in self._cache:
            mats = []
            for m, A in enumerate(self.A):
                n = A.shape[0]
                P = np.eye(n)
                lo = 1 if m == 0 else 0  # the constant mode is left untouched exactly
                sub = A[lo:, lo:]
                if scheme == "exact":
                    mu, V = self._eig[m]
                    P[lo:, lo:] = (V * np.exp(-dt * mu)) @ V.T
                elif scheme == "cn":
                    I = np.eye(n - lo)
                    P[lo:, lo:] = np.linalg.solve(I + 0.5 * dt * sub, I - 0.5 * dt * sub)
                else:
                    raise ValueError(f"unknown propagator scheme {scheme!r}")
                mats.append(P)
            self._cache[key] = tuple(mats)
        return self._cache[key]


def assemble_operator(basis: ConfigBasis, dt: float = 0.0, scheme: str = "exact") -> FpOperator:
    A = []
    eig = []
    for m in range(basis.m_max + 1):
        Am = stiffness_matrix(basis, m)
        Am = 0.5 * (Am + Am.T)
        lo = 1 if m == 0 else 0
        mu, V = scipy.linalg.eigh(Am[lo:, lo:])
        if mu.size and mu[0] < -1e-10 * max(1.0, abs(mu[-1])):
            raise OperatorAssemblyError(f"stiffness matrix for m={m} is indefinite (min eig {mu[0]:.3e})")
        if m == 0 and np.max(np.abs(Am[0])) > 1e-12 * max(1.0, np.max(np.abs(Am))):
            raise OperatorAssemblyError("constant mode has nonzero stiffness")
        A.append(Am)
        eig.append((mu, V))
    op = FpOperator(basis=basis, A=tuple(A), dt=float(dt), scheme=scheme, _eig=tuple(eig))
    if dt > 0:
        op.propagators(dt)
    return op


def _apply_modewise(mats, coeffs):
    out = np.empty_like(coeffs)
    for m, P in enumerate(mats):
        out[m] = np.tensordot(P, coeffs[m], axes=([1], [0]))
    return out


def fp_relax(coeffs, op: FpOperator, dt: float, scheme: str | None = None):
    """Advance pure relaxation d_t g = psi_inf^-1 div(psi_inf grad g) by dt."""
    coeffs = np.asarray(coeffs)
    out = _apply_modewise(op.propagators(dt, scheme), coeffs)
    out[0] = out[0].real
    return out


def rotate(coeffs, omega, dt: float):
    """Exact co-rotation drift over dt: mode m picks up the phase exp(i m omega dt / 2).

    ``omega`` is a scalar or a nodal vorticity field broadcasting against the
    spatial axes of ``coeffs``.
    """
    coeffs = np.asarray(coeffs)
    out = coeffs.copy()
    half = 0.5 * dt * np.asarray(omega, dtype=float)
    for m in range(1, coeffs.shape[0]):
        out[m] = coeffs[m] * np.exp(1j * m * half)
    return out


def entropy(coeffs) -> np.ndarray:
    """int_B |psi - psi_inf|^2 / psi_inf dR = sum_{m,n} |c_{m,n}|^2 (per spatial node)."""
    coeffs = np.asarray(coeffs)
    e = np.sum(np.abs(coeffs[0]) ** 2, axis=0)
    if coeffs.shape[0] > 1:
        e = e + 2.0 * np.sum(np.abs(coeffs[1:]) ** 2, axis=(0, 1))
    return e


def dissipation(coeffs, op: FpOperator) -> np.ndarray:
    """int_B psi_inf |grad_R g|^2 dR = sum_m c_m^* A_m c_m (per spatial node)."""
    coeffs = np.asarray(coeffs)
    total = 0.0
    for m, A in enumerate(op.A):
        Ac = np.tensordot(A, coeffs[m], axes=([1], [0]))
        term = np.sum((np.conj(coeffs[m]) * Ac).real, axis=0)
        total = total + (term if m == 0 else 2.0 * term)
    return total


def spectral_gap(basis: ConfigBasis, return_mode: bool = False):
    """Smallest nonzero eigenvalue over all angular modes (weighted Poincare constant)."""
    best, best_m = np.inf, None
    for m in range(basis.m_max + 1):
        A = stiffness_matrix(basis, m)
        A = 0.5 * (A + A.T)
        lo = 1 if m == 0 else 0
        if A.shape[0] - lo == 0:
            continue
        mu = scipy.linalg.eigh(A[lo:, lo:], eigvals_only=True)
        if not np.all(np.isfinite(mu)):
            raise EigensolverError(f"eigensolver failed for m={m}")
        if mu[0] < best:
            best, best_m = float(mu[0]), m
    if not np.isfinite(best) or best <= 0:
        raise EigensolverError("no positive eigenvalue found; increase n_r")
    return (best, best_m) if return_mode else best


def gap_eigenvector(basis: ConfigBasis):
    """Half-stored coefficients of the unit-entropy lambda_1 eigenfunction (real-valued g)."""
    lam, m = spectral_gap(basis, return_mode=True)
    A = stiffness_matrix(basis, m)
    lo = 1 if m == 0 else 0
    mu, V = scipy.linalg.eigh(0.5 * (A + A.T)[lo:, lo:])
    c = np.zeros((basis.m_max + 1, basis.n_r), dtype=complex)
    c[m, lo:] = V[:, 0]
    c /= np.sqrt(entropy(c))
    return c, lam, m


# --- nodal evaluation on a disk rule -------------------------------------------------


@lru_cache(maxsize=32)
def _nodal_tables(basis: ConfigBasis, n_s: int, n_theta: int):
    q = disk_quadrature(basis.k, n_s, n_theta)
    F, G = [], []
    for m in range(basis.m_max + 1):
        f, rdf = basis.radial_with_derivative(m, q.s)
        ph = np.exp(1j * m * q.theta)
        F.append(f * ph)
        G.append(rdf * ph)
    return q, np.stack(F), np.stack(G)


def nodal_rule_size(basis: ConfigBasis, power: int = 2) -> tuple:
    """(n_s, n_theta) integrating |g|^power psi_inf exactly (power even)."""
    # surviving (theta-averaged) terms are polynomials in s of this degree
    deg_s = (power * basis.m_max) // 2 + power * (basis.n_r - 1)
    n_s = deg_s // 2 + 2
    n_theta = power * basis.m_max + 1
    return n_s, n_theta


def nodal_values(basis: ConfigBasis, coeffs, n_s: int, n_theta: int, with_gradient=False):
    """Evaluate g (and optionally R-gradient of g) at the disk rule nodes.

    Spatial axes of ``coeffs`` come first in the output; the last axis runs
    over the quadrature nodes.
    """
    q, F, G = _nodal_tables(basis, n_s, n_theta)
    coeffs = np.asarray(coeffs)
    M = coeffs.shape[0]
    flat = coeffs.reshape(M * coeffs.shape[1], -1)
    Fm = F.reshape(M * basis.n_r, -1)
    weights = np.ones(M)
    weights[1:] = 2.0
    wf = np.repeat(weights, basis.n_r)[:, None]
    g = ((flat.T) @ (Fm * wf)).real
    g = g.reshape(coeffs.shape[2:] + (q.s.size,))
    if not with_gradient:
        return q, g
    # r d/dr and d/dtheta, then rotate into Cartesian r d/dR_a
    mvec = np.repeat(np.arange(M), basis.n_r)[:, None]
    rdr = ((flat.T) @ (G.reshape(M * basis.n_r, -1) * wf)).real
    dth = ((flat.T) @ (1j * mvec * Fm * wf)).real
    rdr = rdr.reshape(g.shape)
    dth = dth.reshape(g.shape)
    ct, st = np.cos(q.theta), np.sin(q.theta)
    # R_b d_a g  = (R_b / r) (r d_a g)
    r_d1 = ct * rdr - st * dth
    r_d2 = st * rdr + ct * dth
    return q, g, (r_d1, r_d2)


def drift_rate(basis: ConfigBasis, coeffs, sigma):
    """Projection of -(sigma R) . grad_R g onto the basis, computed by quadrature.

    ``sigma`` is a constant 2x2 matrix with ``(sigma R)_a = sum_b sigma[a, b] R_b``.
    This is the strong-form counterpart of the phase rate used by ``rotate``.
    """
    n_s = basis.n_r + basis.m_max + 6
    n_theta = 4 * basis.m_max + 8
    q, g, (r_d1, r_d2) = nodal_values(basis, coeffs, n_s, n_theta, with_gradient=True)
    ct, st = np.cos(q.theta), np.sin(q.theta)
    unit = (ct, st)
    rd = (r_d1, r_d2)
    val = 0.0
    for a in range(2):
        for b in range(2):
            if sigma[a][b] != 0:
                val = val - sigma[a][b] * unit[b] * rd[a]
    val = np.broadcast_to(val, g.shape)
    out = np.zeros((basis.m_max + 1, basis.n_r) + g.shape[:-1], dtype=complex)
    for m in range(basis.m_max + 1):
        b_conj = np.conj(basis.radial(m, q.s) * np.exp(1j * m * q.theta)) * q.weights
        out[m] = np.tensordot(b_conj, val, axes=([1], [-1]))
    return out


@dataclass(frozen=True)
class DriftOperator:
    """Weak-form Galerkin drift for a general (constant) velocity gradient.

    Full-storage indexing: row ``(m + m_max) * n_r + n`` for m in [-m_max, m_max].
    ``d c / dt = sum_ab sigma_ab (forcing[a, b] + matrix[a, b] @ c)`` where
    ``forcing[a, b][i] = int psi_inf R_b d_a conj(b_i)`` and
    ``matrix[a, b][i, j] = int psi_inf b_j R_b d_a conj(b_i)``.
    """

    basis: ConfigBasis
    matrix: np.ndarray
    forcing: np.ndarray


def drift_operator(basis: ConfigBasis) -> DriftOperator:
    M, nr = basis.m_max, basis.n_r
    n_s = nr + M + 6
    n_theta = 4 * M + 12
    q = disk_quadrature(basis.k, n_s, n_theta)
    ct, st = np.cos(q.theta), np.sin(q.theta)
    funcs, rgrads = [], []
    for m in range(-M, M + 1):
        f, rdf = basis.radial_with_derivative(m, q.s)
        ph = np.exp(1j * m * q.theta)
        F = f * ph
        G = rdf * ph
        dth = 1j * m * F
        funcs.append(F)
        rgrads.append((ct * G - st * dth, st * G + ct * dth))
    F = np.concatenate(funcs)  # (N, nq)
    RD = [np.concatenate([g[a] for g in rgrads]) for a in range(2)]
    unit = (ct, st)
    N = F.shape[0]
    matrix = np.zeros((2, 2, N, N), dtype=complex)
    forcing = np.zeros((2, 2, N), dtype=complex)
    for a in range(2):
        for b in range(2):
            test = np.conj(unit[b] * RD[a]) * q.weights  # R_b d_a conj(b_i) psi_inf
            matrix[a, b] = test @ F.T
            forcing[a, b] = test.sum(axis=1)
    return DriftOperator(basis=basis, matrix=matrix, forcing=forcing)


def half_to_full(coeffs):
    """(M+1, n_r, ...) half storage -> (2M+1, n_r, ...) full storage."""
    coeffs = np.asarray(coeffs)
    neg = np.conj(coeffs[1:][::-1])
    return np.concatenate([neg, coeffs], axis=0)


def full_to_half(full):
    M = (full.shape[0] - 1) // 2
    out = np.array(full[M:])
    out[0] = out[0].real
    return out


def apply_full_drift(op: DriftOperator, coeffs, sigma_field, dt: float, substeps: int = 1):
    """Advance the weak-form drift with a spatially varying sigma by classical RK4.

    ``sigma_field`` has shape ``(2, 2) + spatial``; used for the non-co-rotation
    negative control only.
    """
    basis = op.basis
    nr = basis.n_r
    c = half_to_full(coeffs)
    shape = c.shape
    vec = c.reshape(shape[0] * nr, -1)
    sig = np.asarray(sigma_field).reshape(2, 2, -1)

    def rhs(v):
        out = np.zeros_like(v)
        for a in range(2):
            for b in range(2):
                out += sig[a, b] * (op.matrix[a, b] @ v + op.forcing[a, b][:, None])
        return out

    h = dt / substeps
    for _ in range(substeps):
        k1 = rhs(vec)
        k2 = rhs(vec + 0.5 * h * k1)
        k3 = rhs(vec + 0.5 * h * k2)
        k4 = rhs(vec + h * k3)
        vec = vec + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return full_to_half(vec.reshape(shape))
