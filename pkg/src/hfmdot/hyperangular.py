"""Hyperspherical harmonics on the unit 3-sphere of the 4D relative space.

Coordinates in one Jacobi set: X = rho cos(alpha) (cos phi1, sin phi1),
Y = rho sin(alpha) (cos phi2, sin phi2), with the surface measure
``cos(alpha) sin(alpha) dalpha dphi1 dphi2`` (total volume 2 pi^2).

Channels are labelled (K, l1, l2, n) with K = 2n + |l1| + |l2| and total
planar angular momentum L = l1 + l2. All matrices over channels use the
ordering of :func:`enumerate_channels` (K ascending, then l1, then l2).
The reference Jacobi set for matrices is set 3, whose X vector joins
particles 1 and 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from . import jacobi

REFERENCE_SET = 3

SECTORS = ("symmetric", "mixed", "antisymmetric")
YOUNG_LABELS = {"symmetric": "[3]", "mixed": "[2,1]", "antisymmetric": "[1,1,1]"}


@dataclass(frozen=True, order=True)
class Channel:
    K: int
    l1: int
    l2: int
    n: int

    def __post_init__(self):
        if self.n < 0 or self.K != 2 * self.n + abs(self.l1) + abs(self.l2):
            raise ValueError(f"invalid channel: need K = 2n + |l1| + |l2| with n >= 0, got {self}")

    @property
    def L(self) -> int:
        return self.l1 + self.l2

    @classmethod
    def from_l(cls, K: int, l1: int, l2: int) -> "Channel":
        rest = K - abs(l1) - abs(l2)
        if rest < 0 or rest % 2:
            raise ValueError(f"no channel with K={K}, l1={l1}, l2={l2}")
        return cls(K, l1, l2, rest // 2)


def jacobi_poly(n: int, l1: int, l2: int, alpha):
    """Finite-sum polynomial P_n^{l1 l2}(alpha), including the cos^|l1| sin^|l2| factor.

    Depends on |l1| and |l2| only.
    """
    a1, a2 = abs(l1), abs(l2)
    c = np.cos(alpha)
    s = np.sin(alpha)
    total = np.zeros_like(np.asarray(alpha, dtype=float))
    for m in range(n + 1):
        coef = (-1) ** (n - m) * math.comb(n + a2, m) * math.comb(n + a1, n - m)
        total = total + coef * c ** (2 * m + a1) * s ** (2 * (n - m) + a2)
    return total


def normalization(n: int, l1: int, l2: int) -> float:
    a1, a2 = abs(l1), abs(l2)
    K = 2 * n + a1 + a2
    log_num = math.lgamma(n + 1) + math.lgamma(n + a1 + a2 + 1)
    log_den = math.lgamma(n + a1 + 1) + math.lgamma(n + a2 + 1)
    return math.sqrt((K + 1) * math.exp(log_num - log_den) / (2 * math.pi**2))


def eval_harmonic(c: Channel, alpha, phi1, phi2):
    radial = normalization(c.n, c.l1, c.l2) * jacobi_poly(c.n, c.l1, c.l2, alpha)
    return radial * np.exp(1j * (c.l1 * np.asarray(phi1) + c.l2 * np.asarray(phi2)))


def enumerate_channels(K_max: int, L: int, parity: str | None = None) -> list[Channel]:
    """All channels with K <= K_max and l1 + l2 = L.

    ``parity`` may be ``"even"`` or ``"odd"`` to keep only K of that parity.
    """
    if K_max < 0:
        raise ValueError("K_max must be non-negative")
    if parity not in (None, "even", "odd"):
        raise ValueError(f"parity must be None, 'even' or 'odd', got {parity!r}")
    out = []
    for K in range(K_max + 1):
        if parity == "even" and K % 2 or parity == "odd" and not K % 2:
            continue
        for l1 in range(-K, K + 1):
            l2 = L - l1
            rest = K - abs(l1) - abs(l2)
            if rest >= 0 and rest % 2 == 0:
                out.append(Channel(K, l1, l2, rest // 2))
    return out


@dataclass(frozen=True)
class AngularGrid:
    """Gauss-Legendre in alpha times uniform (trapezoidal) grids in phi1, phi2.

    The trapezoid rule with ``n_phi`` points integrates exp(i m phi) exactly
    for |m| < n_phi, so overlaps of channels with K <= K' are exact in phi
    whenever n_phi > K + K'.
    """

    n_alpha: int = 64
    n_phi: int = 64

    def __post_init__(self):
        if self.n_alpha < 1 or self.n_phi < 1:
            raise ValueError("quadrature orders must be positive")

    @cached_property
    def alpha(self) -> np.ndarray:
        x, _ = np.polynomial.legendre.leggauss(self.n_alpha)
        return (x + 1.0) * (np.pi / 4)

    @cached_property
    def alpha_weights(self) -> np.ndarray:
        """Gauss weights times the measure cos(alpha) sin(alpha)."""
        _, w = np.polynomial.legendre.leggauss(self.n_alpha)
        return w * (np.pi / 4) * np.cos(self.alpha) * np.sin(self.alpha)

    @cached_property
    def phi(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_phi) / self.n_phi

    @property
    def phi_weight(self) -> float:
        return 2 * np.pi / self.n_phi

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Flattened (alpha, phi1, phi2, weight) over the full product grid."""
        a, p1, p2 = np.meshgrid(self.alpha, self.phi, self.phi, indexing="ij")
        w = self.alpha_weights[:, None, None] * self.phi_weight**2 * np.ones_like(a)
        return a.ravel(), p1.ravel(), p2.ravel(), w.ravel()

    @property
    def total_weight(self) -> float:
        return float(self.alpha_weights.sum() * (self.phi_weight * self.n_phi) ** 2)


DEFAULT_GRID = AngularGrid()


def gram_matrix(channels: list[Channel], grid: AngularGrid = DEFAULT_GRID) -> np.ndarray:
    """Quadrature overlaps <Phi_c | Phi_c'>, using the product structure of the grid."""
    radial = np.array(
        [normalization(c.n, c.l1, c.l2) * jacobi_poly(c.n, c.l1, c.l2, grid.alpha) for c in channels]
    )
    e1 = np.exp(1j * np.outer([c.l1 for c in channels], grid.phi))
    e2 = np.exp(1j * np.outer([c.l2 for c in channels], grid.phi))
    g_alpha = (radial * grid.alpha_weights) @ radial.T
    g1 = e1.conj() @ e1.T * grid.phi_weight
    g2 = e2.conj() @ e2.T * grid.phi_weight
    return g_alpha * g1 * g2


def grand_angular_apply(c: Channel, grid: AngularGrid = AngularGrid(48, 24), step: float = 1e-3) -> float:
    """Rayleigh quotient of minus the grand angular operator, by finite differences.

    The operator is d2/dalpha2 + 2 cot(2 alpha) d/dalpha + (1/cos^2) d2/dphi1^2
    + (1/sin^2) d2/dphi2^2, whose harmonics have eigenvalue -K(K+2). Each
    second derivative uses the 5-point stencil on the analytic harmonic, so
    the result approaches K(K+2) as O(step^4).
    """
    a, p1, p2, w = grid.mesh
    h = step

    def f(da=0.0, d1=0.0, d2=0.0):
        return eval_harmonic(c, a + da, p1 + d1, p2 + d2)

    f0 = f()

    def second(**kw):
        (key,) = kw
        return (
            -f(**{key: 2 * h}) + 16 * f(**{key: h}) - 30 * f0 + 16 * f(**{key: -h}) - f(**{key: -2 * h})
        ) / (12 * h * h)

    d_alpha = (-f(da=2 * h) + 8 * f(da=h) - 8 * f(da=-h) + f(da=-2 * h)) / (12 * h)
    lap = (
        second(da=h)
        + 2.0 / np.tan(2 * a) * d_alpha
        + second(d1=h) / np.cos(a) ** 2
        + second(d2=h) / np.sin(a) ** 2
    )
    num = np.sum(w * np.conj(f0) * lap)
    den = np.sum(w * np.abs(f0) ** 2)
    return float(-(num / den).real)


def _transform_points(grid: AngularGrid, T: np.ndarray):
    """Hyperangles of the points (X', Y') = T (X, Y) for every grid point at rho = 1."""
    a, p1, p2, w = grid.mesh
    ca, sa = np.cos(a), np.sin(a)
    X = np.stack([ca * np.cos(p1), ca * np.sin(p1)])
    Y = np.stack([sa * np.cos(p2), sa * np.sin(p2)])
    Xp = T[0, 0] * X + T[0, 1] * Y
    Yp = T[1, 0] * X + T[1, 1] * Y
    x = np.hypot(Xp[0], Xp[1])
    y = np.hypot(Yp[0], Yp[1])
    alpha = np.arctan2(y, x)
    phi1 = np.arctan2(Xp[1], Xp[0])
    phi2 = np.arctan2(Yp[1], Yp[0])
    return alpha, phi1, phi2


def transform_overlap(
    out_channels: list[Channel], in_channels: list[Channel], T: np.ndarray, grid: AngularGrid = DEFAULT_GRID
) -> np.ndarray:
    """Matrix M[a, b] = integral of conj(Phi_a(Omega)) Phi_b(Omega') dOmega,
    where Omega' are the hyperangles of T applied to (X, Y)."""
    a, p1, p2, w = grid.mesh
    ta, t1, t2 = _transform_points(grid, T)
    left = np.array([eval_harmonic(c, a, p1, p2) for c in out_channels])
    right = np.array([eval_harmonic(c, ta, t1, t2) for c in in_channels])
    return (left.conj() * w) @ right.T


@lru_cache(maxsize=None)
def _rr_cached(K: int, L: int, from_set: int, to_set: int, grid: AngularGrid) -> np.ndarray:
    chans = [c for c in enumerate_channels(K, L) if c.K == K]
    if from_set == to_set:
        return np.eye(len(chans), dtype=complex)
    # a point is given in to_set coordinates; its from_set coordinates are a rotation of them
    T = jacobi.rotation_matrix(jacobi.rotation_angle(to_set, from_set))
    M = transform_overlap(chans, chans, T, grid)
    M.setflags(write=False)
    return M


def rr_matrix(K: int, L: int, from_set: int, to_set: int, grid: AngularGrid = DEFAULT_GRID) -> np.ndarray:
    """Raynal-Revai matrix: Phi_c(Omega_from) = sum_c' M[c', c] Phi_c'(Omega_to).

    Rows and columns run over the channels with exactly this (K, L).
    """
    return _rr_cached(K, L, from_set, to_set, grid).copy()


def unitarity_defect(M: np.ndarray) -> float:
    return float(np.abs(M.conj().T @ M - np.eye(M.shape[1])).max())


PERMUTATIONS = {
    (1, 2, 3): 1,
    (2, 3, 1): 1,
    (3, 1, 2): 1,
    (2, 1, 3): -1,
    (1, 3, 2): -1,
    (3, 2, 1): -1,
}


@lru_cache(maxsize=None)
def _perm_cached(K: int, L: int, perm: tuple[int, int, int], grid: AngularGrid) -> np.ndarray:
    chans = [c for c in enumerate_channels(K, L) if c.K == K]
    T = jacobi.permutation_map(perm, REFERENCE_SET)
    P = transform_overlap(chans, chans, T, grid)
    P.setflags(write=False)
    return P


def permutation_matrix(K: int, L: int, perm: tuple[int, int, int], grid: AngularGrid = DEFAULT_GRID) -> np.ndarray:
    """Matrix of the relabelling operator (P f)(r1, r2, r3) = f(r_perm) on the (K, L) channels."""
    return _perm_cached(K, L, tuple(perm), grid).copy()


def group_matrices(K: int, L: int, grid: AngularGrid = DEFAULT_GRID) -> tuple[list, list]:
    """Representation matrices of the even and odd relabellings on the (K, L) channels.

    Only the exchange (2,1,3) and the cycle (2,3,1) are integrated; the
    other four elements are their products.
    """
    t = permutation_matrix(K, L, (2, 1, 3), grid)
    c = permutation_matrix(K, L, (2, 3, 1), grid)
    c2 = c @ c
    return [np.eye(len(t)), c, c2], [t, t @ c, t @ c2]


def sector_for_spin(spin: float) -> str:
    """Spatial symmetry paired with total spin S for three electrons."""
    if spin == 0.5:
        return "mixed"
    if spin == 1.5:
        return "antisymmetric"
    raise ValueError(f"three electrons have S = 1/2 or 3/2, got {spin}")


def projector(K: int, L: int, sector: str, grid: AngularGrid = DEFAULT_GRID) -> np.ndarray:
    """Young projector on the (K, L) channels.

    For ``"mixed"`` this projects onto one row of the [2,1] irrep, the
    states that are also even under exchange of particles 1 and 2.
    """
    if sector not in SECTORS:
        raise ValueError(f"unknown symmetry sector {sector!r}")
    even, odd = group_matrices(K, L, grid)
    sym = (sum(even) + sum(odd)) / 6
    anti = (sum(even) - sum(odd)) / 6
    if sector == "symmetric":
        return sym
    if sector == "antisymmetric":
        return anti
    n = sym.shape[0]
    mixed = np.eye(n) - sym - anti
    return mixed @ (np.eye(n) + odd[0]) / 2


@dataclass(frozen=True)
class SymmetrizedBasis:
    """Orthonormal states of one permutation symmetry at fixed (K, L).

    ``coefficients[:, nu]`` expands state ``nu`` over ``channels``.
    """

    sector: str
    K: int
    L: int
    channels: tuple[Channel, ...]
    coefficients: np.ndarray

    @property
    def young_diagram(self) -> str:
        return YOUNG_LABELS[self.sector]

    @property
    def dim(self) -> int:
        return self.coefficients.shape[1]


def _fix_phase(vectors: np.ndarray) -> np.ndarray:
    """Make the first clearly nonzero component of each column real and positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        k = int(np.argmax(np.abs(col) > 1e-8))
        out[:, j] = col * (abs(col[k]) / col[k])
    return out


def _orthonormal_range(P: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Gram-Schmidt over the columns of P in channel order (deterministic)."""
    basis = np.zeros((P.shape[0], 0), dtype=complex)
    for j in range(P.shape[1]):
        v = P[:, j].astype(complex)
        for _ in range(2):
            v = v - basis @ (basis.conj().T @ v)
        nrm = np.linalg.norm(v)
        if nrm > tol:
            basis = np.column_stack([basis, v / nrm])
    return basis


@lru_cache(maxsize=None)
def _symmetrize_cached(K: int, L: int, sector: str, grid: AngularGrid) -> SymmetrizedBasis:
    chans = tuple(c for c in enumerate_channels(K, L) if c.K == K)
    if not chans:
        return SymmetrizedBasis(sector, K, L, chans, np.zeros((0, 0), dtype=complex))
    P = projector(K, L, sector, grid)
    rank = int(round(np.trace(P).real))
    C = _fix_phase(_orthonormal_range(P))
    if C.shape[1] != rank:
        raise RuntimeError(f"projector rank {rank} but {C.shape[1]} independent columns at K={K}, L={L}")
    C.setflags(write=False)
    return SymmetrizedBasis(sector, K, L, chans, C)


def symmetrize(K: int, L: int, sector: str, grid: AngularGrid = DEFAULT_GRID) -> SymmetrizedBasis:
    """Orthonormal basis of the (K, L) harmonics in the given symmetry sector.

    An empty basis (dim 0) is returned when the sector has no states here.
    """
    if sector not in SECTORS:
        raise ValueError(f"unknown symmetry sector {sector!r}")
    return _symmetrize_cached(K, L, sector, grid)
