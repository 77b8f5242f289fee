"""Configuration space of a 2D FENE dumbbell: the unit disk B(0, 1).

Everything radial is written in the variable ``s = r**2``.  With that change
of variables the equilibrium weight becomes ``(1 - s)**k`` and the area
element ``dR = 0.5 ds dtheta``, so every integral against the equilibrium is
a Gauss-Jacobi integral on [0, 1] and the potential singularity at ``r = 1``
never has to be evaluated pointwise.

The Galerkin basis is

    b_{m,n}(R) = r**|m| * p_{m,n}(r**2) * exp(i m theta)

with ``p_{m,n}`` orthonormal for the weight ``(k + 1) (1 - s)**k s**|m|``.
That normalisation makes the basis orthonormal for
``<f, g> = int_B f conj(g) psi_inf dR``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln, gammaln, roots_jacobi


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class BasisConstructionError(RuntimeError):
    pass


@dataclass(frozen=True)
class FeneParams:
    k: float = 1.0
    n_r: int = 8
    m_max: int = 2

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0):
            raise DomainError(f"k must be a positive finite number, got {self.k}")
        if int(self.n_r) != self.n_r or self.n_r < 1:
            raise DomainError(f"n_r must be a positive integer, got {self.n_r}")
        if int(self.m_max) != self.m_max or self.m_max < 0:
            raise DomainError(f"m_max must be a nonnegative integer, got {self.m_max}")

    def validate_for_simulation(self):
        """Stricter checks used by the coupled solver (stress lives on m = +-2)."""
        if self.n_r < 2:
            raise DomainError("simulation requires n_r >= 2")
        if self.m_max < 2:
            raise DomainError("simulation requires m_max >= 2 (the stress lives on m = +-2)")


def normalization_constant(k: float) -> float:
    """Return ``int_B (1 - |R|^2)^k dR = pi / (k + 1)``."""
    k = float(k)
    if not math.isfinite(k) or k <= -1:
        raise DomainError(f"normalization_constant needs finite k > -1, got {k}")
    return math.pi / (k + 1.0)


@dataclass(frozen=True)
class Equilibrium:
    k: float
    c0: float

    @classmethod
    def from_k(cls, k: float) -> "Equilibrium":
        return cls(k=float(k), c0=normalization_constant(k))

    def density_s(self, s):
        """psi_inf as a function of s = |R|^2 (vectorised, no domain checks)."""
        return np.clip(1.0 - np.asarray(s, dtype=float), 0.0, None) ** self.k / self.c0


def equilibrium_density(R, eq: Equilibrium) -> float:
    R = np.asarray(R, dtype=float)
    s = float(R @ R)
    if s > 1.0:
        raise DomainError(f"|R| = {math.sqrt(s)} lies outside the unit disk")
    if s == 1.0:
        return 0.0
    return (1.0 - s) ** eq.k / eq.c0


def potential_gradient(R, k: float) -> np.ndarray:
    """Gradient of U(R) = -k log(1 - |R|^2), i.e. 2 k R / (1 - |R|^2)."""
    R = np.asarray(R, dtype=float)
    s = float(R @ R)
    if s >= 1.0:
        raise DomainError("potential gradient is singular for |R| >= 1")
    return 2.0 * k * R / (1.0 - s)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Jacobi rule on [0, 1] for the weight ``(1 - s)**alpha * s**beta``.

    ``exact_degree`` is the largest polynomial degree in ``s`` integrated
    exactly, ``2 * len(nodes) - 1``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    exponent_pair: tuple

    @property
    def exact_degree(self) -> int:
        return 2 * len(self.nodes) - 1

    def integrate(self, values) -> np.ndarray:
        return np.tensordot(np.asarray(values), self.weights, axes=([-1], [0]))


def jacobi_rule(n: int, alpha: float, beta: float) -> QuadratureRule:
    if n < 1:
        raise DomainError("a quadrature rule needs at least one node")
    if alpha <= -1 or beta <= -1:
        raise DomainError(f"Jacobi exponents must exceed -1, got ({alpha}, {beta})")
    x, w = roots_jacobi(n, alpha, beta)
    s = 0.5 * (1.0 + x)
    w = w * 2.0 ** (-(alpha + beta + 1.0))
    return QuadratureRule(nodes=s, weights=w, exponent_pair=(float(alpha), float(beta)))


def beta_moment(j: int, alpha: float, beta: float) -> float:
    """Closed form of ``int_0^1 s**j (1 - s)**alpha s**beta ds``."""
    return math.exp(betaln(beta + j + 1.0, alpha + 1.0))


def _jacobi_recurrence(n: int, a: float, b: float):
    """Orthonormal three-term recurrence for (1 - x)^a (1 + x)^b on [-1, 1].

    Returns (diag, offdiag, mu0) with ``x p_j = off[j+1] p_{j+1} + diag[j] p_j
    + off[j] p_{j-1}`` and ``mu0`` the total mass of the weight.
    """
    j = np.arange(n, dtype=float)
    ab = a + b
    diag = np.empty(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        diag[:] = (b * b - a * a) / ((2 * j + ab) * (2 * j + ab + 2))
    diag[0] = (b - a) / (ab + 2)
    off = np.zeros(n + 1)
    jj = np.arange(1, n + 1, dtype=float)
    num = 4 * jj * (jj + a) * (jj + b) * (jj + ab)
    den = (2 * jj + ab) ** 2 * (2 * jj + ab + 1) * (2 * jj + ab - 1)
    off[1:] = np.sqrt(num / den)
    if n >= 1 and abs(ab) < 1e-300:
        # j = 1 with a + b = 0 hits 0/0 in the (jj + ab) / (2 jj + ab - 1) factor
        off[1] = math.sqrt(2 * (1 + a) * (1 + b) / ((2 + ab) ** 2 * (3 + ab)))
    mu0 = math.exp((ab + 1) * math.log(2.0) + gammaln(a + 1) + gammaln(b + 1) - gammaln(ab + 2))
    return diag, off, mu0


def orthonormal_radial(n_r: int, k: float, m: int, s):
    """Values and s-derivatives of the orthonormal radial polynomials.

    Orthonormality is with respect to ``(k + 1) (1 - s)**k s**|m| ds`` on
    [0, 1].  Returns two arrays of shape ``(n_r,) + s.shape``.
    """
    a, b = float(k), float(abs(m))
    s = np.asarray(s, dtype=float)
    x = 2.0 * s - 1.0
    diag, off, mu0 = _jacobi_recurrence(n_r, a, b)
    # weight (k+1)(1-s)^k s^b ds  ==  (k+1) 2^{-(a+b+1)} (1-x)^a (1+x)^b dx
    scale = 1.0 / math.sqrt((k + 1.0) * 2.0 ** (-(a + b + 1.0)))
    p = np.zeros((n_r,) + s.shape)
    dp = np.zeros((n_r,) + s.shape)
    p[0] = 1.0 / math.sqrt(mu0)
    if n_r > 1:
        p[1] = (x - diag[0]) * p[0] / off[1]
        dp[1] = p[0] / off[1]
    for j in range(1, n_r - 1):
        p[j + 1] = ((x - diag[j]) * p[j] - off[j] * p[j - 1]) / off[j + 1]
        dp[j + 1] = ((x - diag[j]) * dp[j] + p[j] - off[j] * dp[j - 1]) / off[j + 1]
    # d/ds = 2 d/dx
    return p * scale, 2.0 * dp * scale


@dataclass(frozen=True, eq=False)
class ConfigBasis:
    """Weighted-orthonormal Galerkin basis, tabulated on its quadrature rules.

    ``mass_rules[m]`` carries weight ``(1-s)^k s^m`` and ``stiff_rules[m]``
    weight ``(1-s)^k s^max(m-1, 0)``; tables ``P[m]`` / ``dP[m]`` hold the
    radial polynomials and their s-derivatives at the corresponding nodes.
    Only ``m >= 0`` is stored: ``b_{-m,n} = conj(b_{m,n})``.
    """

    params: FeneParams
    eq: Equilibrium
    n_quad: int
    mass_rules: tuple
    stiff_rules: tuple
    P_mass: tuple
    P_stiff: tuple
    dP_stiff: tuple
    gram_error: float = 0.0

    @property
    def k(self) -> float:
        return self.params.k

    @property
    def n_r(self) -> int:
        return self.params.n_r

    @property
    def m_max(self) -> int:
        return self.params.m_max

    def radial(self, m: int, s):
        """Values ``r**|m| p_{m,n}(s)`` for all n, shape ``(n_r,) + s.shape``."""
        s = np.asarray(s, dtype=float)
        p, _ = orthonormal_radial(self.n_r, self.k, m, s)
        return p * s ** (abs(m) / 2.0)

    def radial_with_derivative(self, m: int, s):
        """Return ``(f, r df/dr)`` for ``f = r**|m| p_{m,n}(s)``."""
        s = np.asarray(s, dtype=float)
        am = abs(m)
        p, dp = orthonormal_radial(self.n_r, self.k, m, s)
        rm = s ** (am / 2.0)
        return p * rm, (am * p + 2.0 * s * dp) * rm

    def evaluate(self, coeffs, s, theta):
        """Evaluate the real field g from half-stored coefficients.

        ``coeffs`` has shape ``(m_max + 1, n_r, ...)`` (m >= 0 only); the
        result has shape ``coeffs.shape[2:] + s.shape`` where ``s`` and
        ``theta`` broadcast together.
        """
        coeffs = np.asarray(coeffs)
        s, theta = np.broadcast_arrays(np.asarray(s, float), np.asarray(theta, float))
        out = 0.0
        for m in range(self.m_max + 1):
            f = self.radial(m, s)
            term = np.tensordot(coeffs[m], f, axes=([0], [0]))
            if m == 0:
                out = out + term.real
            else:
                out = out + 2.0 * (term * np.exp(1j * m * theta)).real
        return out


def default_quadrature_size(params: FeneParams) -> int:
    return params.n_r + int(math.ceil(params.k)) + 4


def build_basis(params: FeneParams, n_quad: int | None = None, gram_tol: float = 1e-10) -> ConfigBasis:
    """Tabulate the orthonormal basis and verify its Gram matrix."""
    if n_quad is None:
        n_quad = default_quadrature_size(params)
    if n_quad < params.n_r:
        raise BasisConstructionError(
            f"{n_quad} quadrature nodes cannot integrate the degree-{2 * params.n_r - 2} Gram matrix exactly"
        )
    k = params.k
    mass_rules, stiff_rules, P_mass, P_stiff, dP_stiff = [], [], [], [], []
    worst = 0.0
    for m in range(params.m_max + 1):
        mr = jacobi_rule(n_quad, k, m)
        sr = jacobi_rule(n_quad, k, max(m - 1, 0))
        p, _ = orthonormal_radial(params.n_r, k, m, mr.nodes)
        ps, dps = orthonormal_radial(params.n_r, k, m, sr.nodes)
        gram = (k + 1.0) * (p * mr.weights) @ p.T
        worst = max(worst, float(np.max(np.abs(gram - np.eye(params.n_r)))))
        mass_rules.append(mr)
        stiff_rules.append(sr)
        P_mass.append(p)
        P_stiff.append(ps)
        dP_stiff.append(dps)
    if worst > gram_tol:
        raise BasisConstructionError(f"Gram matrix deviates from identity by {worst:.3e}")
    return ConfigBasis(
        params=params,
        eq=Equilibrium.from_k(k),
        n_quad=n_quad,
        mass_rules=tuple(mass_rules),
        stiff_rules=tuple(stiff_rules),
        P_mass=tuple(P_mass),
        P_stiff=tuple(P_stiff),
        dP_stiff=tuple(dP_stiff),
        gram_error=worst,
    )


def gram_matrix(basis: ConfigBasis, m: int) -> np.ndarray:
    m = abs(m)
    p = basis.P_mass[m]
    return (basis.k + 1.0) * (p * basis.mass_rules[m].weights) @ p.T


@dataclass(frozen=True)
class DiskQuadrature:
    """Tensor rule on the disk: Gauss-Jacobi in s times uniform in theta.

    ``weights`` already include psi_inf and the 0.5 ds dtheta area factor, so
    ``sum(w * f(s, theta))`` approximates ``int_B f psi_inf dR``.
    """

    s: np.ndarray
    theta: np.ndarray
    weights: np.ndarray

    @property
    def R1(self):
        return np.sqrt(self.s) * np.cos(self.theta)

    @property
    def R2(self):
        return np.sqrt(self.s) * np.sin(self.theta)


def disk_quadrature(k: float, n_s: int, n_theta: int, alpha_shift: float = 0.0) -> DiskQuadrature:
    """psi_inf-weighted disk rule; ``alpha_shift=-1`` integrates ``f psi_inf / (1 - s)``."""
    rule = jacobi_rule(n_s, k + alpha_shift, 0.0)
    th = 2.0 * np.pi * np.arange(n_theta) / n_theta
    S, TH = np.meshgrid(rule.nodes, th, indexing="ij")
    c0 = normalization_constant(k)
    W = np.outer(rule.weights, np.full(n_theta, 2.0 * np.pi / n_theta)) * 0.5 / c0
    return DiskQuadrature(s=S.ravel(), theta=TH.ravel(), weights=W.ravel())


def project(basis: ConfigBasis, func, n_s: int | None = None, n_theta: int | None = None) -> np.ndarray:
    """Weighted L2 projection of ``func(R1, R2)`` onto the basis (half storage)."""
    n_s = n_s or 2 * basis.n_r + 2 * basis.m_max + 16
    n_theta = n_theta or 4 * basis.m_max + 32
    q = disk_quadrature(basis.k, n_s, n_theta)
    vals = np.asarray(func(q.R1, q.R2), dtype=float)
    out = np.zeros((basis.m_max + 1, basis.n_r) + vals.shape[:-1], dtype=complex)
    for m in range(basis.m_max + 1):
        b = basis.radial(m, q.s) * np.exp(1j * m * q.theta)
        out[m] = np.tensordot(np.conj(b) * q.weights, vals, axes=([1], [-1]))
    out[0] = out[0].real
    return out
