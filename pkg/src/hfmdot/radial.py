"""Hyperradial oscillator basis, log-moment integrals and a finite-difference oracle.

Radial functions u(rho) = rho^{3/2} chi(rho) obey, in internal units,

    -u'' + [((K+1)^2 - 1/4) / rho^2 + alpha^2 rho^2 + 2 v(rho)] u = 2 eps u,

with alpha = omega_eff/omega0 and v the interaction in units of hbar*omega0.
For v = 0 the solutions are

    u_KN(rho) = n_KN rho^{K+3/2} exp(-alpha rho^2 / 2) L_N^{K+1}(alpha rho^2),
    eps = alpha (2N + K + 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg, special

SQRT_TWO_THIRDS_PREFACTOR = math.sqrt(2.0 / 3.0)
# Established by solve_diagonal_ode at beta = 0: eps / (2N + K + 2) = alpha exactly.
ORACLE_PREFACTOR = 1.0
PREFACTORS = {"paper": SQRT_TWO_THIRDS_PREFACTOR, "oracle": ORACLE_PREFACTOR}


@dataclass(frozen=True)
class RadialBasisIndex:
    K: int
    N: int
    alpha_scale: float = 1.0

    def __post_init__(self):
        if self.K < 0 or self.N < 0:
            raise ValueError("K and N must be non-negative")
        if not self.alpha_scale > 0:
            raise ValueError("alpha_scale must be positive")


@dataclass(frozen=True)
class RadialGrid:
    """Uniform interior nodes rho_i = i*h, i = 1..n_nodes, with h = rho_max/(n_nodes+1)."""

    n_nodes: int = 4000
    rho_max: float = 12.0

    @property
    def step(self) -> float:
        return self.rho_max / (self.n_nodes + 1)

    @property
    def rho(self) -> np.ndarray:
        return self.step * np.arange(1, self.n_nodes + 1)

    @classmethod
    def for_width(cls, alpha_scale: float, n_nodes: int = 4000) -> "RadialGrid":
        return cls(n_nodes, 12.0 / math.sqrt(alpha_scale))


def _log_norm(K: int, N: int, alpha: float) -> float:
    return 0.5 * (math.log(2.0) + (K + 2) * math.log(alpha) + math.lgamma(N + 1) - math.lgamma(N + K + 2))


def radial_basis(idx: RadialBasisIndex, rho):
    """u_KN(rho), unit-normalized on [0, inf) with measure d rho."""
    rho = np.asarray(rho, dtype=float)
    K, N, a = idx.K, idx.N, idx.alpha_scale
    t = a * rho**2
    with np.errstate(divide="ignore"):
        log_pref = _log_norm(K, N, a) + (K + 1.5) * np.log(rho) - t / 2
    return np.where(rho > 0, np.exp(log_pref) * special.eval_genlaguerre(N, K + 1, t), 0.0)


def noninteracting_energy(N: int, K: int, L_z: int, hbar_omega: float, hbar_omega_L: float, prefactor_mode: str = "oracle") -> float:
    """Relative-motion oscillator level c*hbar*omega*(2N+K+2) - hbar*omega_L*L_z."""
    try:
        c = PREFACTORS[prefactor_mode]
    except KeyError:
        raise ValueError(f"prefactor_mode must be one of {sorted(PREFACTORS)}") from None
    return c * hbar_omega * (2 * N + K + 2) - hbar_omega_L * L_z


# --- Laguerre moments -------------------------------------------------------


def _log_h(K: int, N: int) -> float:
    """Log of the Laguerre norm Gamma(N + K + 2) / N! (weight t^{K+1} e^-t)."""
    return math.lgamma(N + K + 2) - math.lgamma(N + 1)


def _gbinom(x: int, k: int) -> int:
    """Binomial coefficient with integer, possibly negative, upper argument."""
    num = 1
    for i in range(k):
        num *= x - i
    return num // math.factorial(k)


def radial_overlap(K: int, N: int, Kp: int, Np: int) -> float:
    """<u_KN | u_K'N'> for a common width; independent of the width itself.

    Both Laguerre polynomials are re-expanded in L_j^{(b)}, b = (K+K')/2 + 1,
    which is orthogonal for the common weight t^b e^-t. Requires K - K' even.
    """
    if (K - Kp) % 2:
        raise ValueError("radial overlap needs K - K' even")
    if K == Kp:
        return 1.0 if N == Np else 0.0
    b = (K + Kp) // 2 + 1
    d, dp = K + 1 - b, Kp + 1 - b
    total = 0
    for j in range(min(N, Np) + 1):
        total += _gbinom(d + N - j - 1, N - j) * _gbinom(dp + Np - j - 1, Np - j) * math.perm(j + b, b)
    if total == 0:
        return 0.0
    sign = -1.0 if total < 0 else 1.0
    return sign * math.exp(math.log(abs(total)) - 0.5 * (_log_h(K, N) + _log_h(Kp, Np)))


def log_radial_element_analytic(K: int, N: int, Np: int, alpha_scale: float = 1.0, rho0: float = 1.0) -> float:
    """<u_KN | ln(rho/rho0) | u_KN'> in closed form.

    With t = alpha rho^2 and orthonormal Laguerre functions of weight
    t^a e^-t (a = K + 1): <N|ln t|N> = psi(N + a + 1) and, for m < n,
    <m|ln t|n> = -sqrt(Gamma(m+a+1) n! / (m! Gamma(n+a+1))) / (n - m).
    """
    a = K + 1
    if N == Np:
        return 0.5 * float(special.digamma(N + a + 1)) - 0.5 * math.log(alpha_scale) - math.log(rho0)
    m, n = min(N, Np), max(N, Np)
    return -0.5 * math.exp(0.5 * (_log_h(K, m) - _log_h(K, n))) / (n - m)


def log_radial_element_quadrature(K: int, N: int, Np: int, alpha_scale: float = 1.0, rho0: float = 1.0) -> float:
    """Same element by adaptive quadrature on [0, inf)."""
    i1 = RadialBasisIndex(K, N, alpha_scale)
    i2 = RadialBasisIndex(K, Np, alpha_scale)

    def f(r):
        return radial_basis(i1, r) * radial_basis(i2, r) * math.log(r / rho0)

    peak = math.sqrt((2 * max(N, Np) + K + 2) / alpha_scale)
    edges = [0.0, 0.25 * peak, 0.5 * peak, peak, 1.5 * peak, 2.5 * peak, 4.0 * peak + 10 / math.sqrt(alpha_scale)]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=400)[0]
    return total


class QuadratureMismatch(RuntimeError):
    pass


def log_radial_element(K: int, N: int, Np: int, alpha_scale: float = 1.0, rho0: float = 1.0, check: bool = True, tol: float = 1e-10) -> float:
    """<u_KN | ln(rho/rho0) | u_KN'>; analytic value, verified by quadrature when ``check``."""
    val = log_radial_element_analytic(K, N, Np, alpha_scale, rho0)
    if check:
        q = log_radial_element_quadrature(K, N, Np, alpha_scale, rho0)
        if abs(q - val) > tol:
            raise QuadratureMismatch(f"log element K={K} N={N} N'={Np}: analytic {val!r} vs quadrature {q!r}")
    return val


def log_matrix(K: int, N_max: int, alpha_scale: float = 1.0, rho0: float = 1.0) -> np.ndarray:
    """(N_max+1)^2 block of log elements at fixed K (analytic)."""
    n = N_max + 1
    out = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            out[i, j] = out[j, i] = log_radial_element_analytic(K, i, j, alpha_scale, rho0)
    return out


def overlap_matrix(K: int, Kp: int, N_max: int) -> np.ndarray:
    n = N_max + 1
    return np.array([[radial_overlap(K, i, Kp, j) for j in range(n)] for i in range(n)])


# --- finite-difference oracle ------------------------------------------------


@dataclass(frozen=True)
class ODESolution:
    energy: float
    rho: np.ndarray
    u: np.ndarray
    richardson_error: float


def _fd_lowest(K: int, alpha_scale: float, potential, grid: RadialGrid):
    rho = grid.rho
    h = grid.step
    cent = ((K + 1) ** 2 - 0.25) / rho**2
    diag = 2.0 / h**2 + cent + alpha_scale**2 * rho**2 + 2.0 * potential(rho)
    off = np.full(len(rho) - 1, -1.0 / h**2)
    vals, vecs = linalg.eigh_tridiagonal(diag, off, select="i", select_range=(0, 0))
    u = vecs[:, 0] / math.sqrt(h)
    if u[np.argmax(np.abs(u))] < 0:
        u = -u
    return vals[0] / 2.0, rho, u


def solve_diagonal_ode(
    K: int,
    alpha_scale: float = 1.0,
    beta: float = 0.0,
    rho0: float = 1.0,
    grid: RadialGrid | None = None,
    log_coefficient: float = 1.0,
    constant: float = 0.0,
) -> ODESolution:
    """Lowest eigenvalue of one diagonal hyperradial equation by 3-point finite differences.

    The interaction is v(rho) = beta * (log_coefficient * ln(rho/rho0) + constant)
    in units of hbar*omega0. Two grids (h and h/2) are combined by Richardson
    extrapolation; the returned energy eps excludes any -omega_L L_z shift.
    """
    grid = grid or RadialGrid.for_width(alpha_scale)

    def v(r):
        return beta * (log_coefficient * np.log(r / rho0) + constant)

    coarse = RadialGrid(grid.n_nodes // 2, grid.rho_max)
    fine_n = 2 * coarse.n_nodes + 1
    fine = RadialGrid(fine_n, grid.rho_max)
    e1, _, _ = _fd_lowest(K, alpha_scale, v, coarse)
    e2, rho, u = _fd_lowest(K, alpha_scale, v, fine)
    extrap = (4 * e2 - e1) / 3
    return ODESolution(extrap, rho, u, abs(extrap - e2))
