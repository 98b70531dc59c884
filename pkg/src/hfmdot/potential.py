"""Angular matrix elements of the logarithmic pair interaction.

Each pair term is beta * ln(|r_ij| / rho0). In the Jacobi set whose X vector
joins i and j, |r_ij| = kappa * rho * cos(alpha) with kappa = sqrt(2/sqrt(3))
for equal masses, so

    ln(|r_ij| / rho0) = ln(rho / rho0) + ln(cos alpha) + ln(kappa).

The first term is diagonal over orthonormal harmonics. The second gives the
rho-independent constants C[c, c']. ln(kappa) is a pure shift and goes into B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate, linalg

from . import hyperangular as ha
from .hyperangular import AngularGrid, Channel

# |r_jk| = SEPARATION_SCALE * |X| for three equal masses
SEPARATION_SCALE = math.sqrt(2.0 / math.sqrt(3.0))

PAIR_SETS = {(1, 2): 3, (2, 3): 1, (1, 3): 2}


class PairIntegral(NamedTuple):
    ln_coefficient: float
    constant: float
    suppressed: bool = False


def log_cos_moment(f, epsabs: float = 1e-15) -> tuple[float, float]:
    """Integral of f(alpha) ln(cos alpha) cos(alpha) sin(alpha) over [0, pi/2].

    Substituting t = cos^2(alpha) turns it into (1/4) * int_0^1 f ln(t) dt,
    which QUADPACK's algebraic-log weight integrates without trouble at the
    logarithmic endpoint. Returns (value, error estimate).
    """
    val, err = integrate.quad(
        lambda t: f(np.arccos(np.sqrt(t))), 0.0, 1.0, weight="alg-loga", wvar=(0.0, 0.0),
        epsabs=epsabs, epsrel=1e-14, limit=200,
    )
    return 0.25 * val, 0.25 * err


def own_set_constant(c: Channel, cp: Channel, tol: float = 1e-10) -> float:
    """<Phi_c | ln cos(alpha) | Phi_c'> in the pair's own Jacobi set."""
    if c.l1 != cp.l1 or c.l2 != cp.l2:
        return 0.0
    norm = ha.normalization(c.n, c.l1, c.l2) * ha.normalization(cp.n, cp.l1, cp.l2)

    def f(alpha):
        return ha.jacobi_poly(c.n, c.l1, c.l2, alpha) * ha.jacobi_poly(cp.n, cp.l1, cp.l2, alpha)

    val, err = log_cos_moment(f)
    if err > tol:
        raise RuntimeError(f"log-moment quadrature error {err:.2e} above {tol:.0e} for {c}, {cp}")
    return (2 * math.pi) ** 2 * norm * val


def c_constant_matrix(channels: list[Channel]) -> np.ndarray:
    """Constants C[c, c'] of one pair term, channels taken in that pair's own set."""
    n = len(channels)
    C = np.zeros((n, n))
    for a in range(n):
        for b in range(a, n):
            C[a, b] = C[b, a] = own_set_constant(channels[a], channels[b])
    return C


def _block_rr(channels: list[Channel], from_set: int, to_set: int, grid: AngularGrid) -> np.ndarray:
    """Block-diagonal (over K) Raynal-Revai matrix on an ordered channel list."""
    blocks = []
    for K in sorted({c.K for c in channels}):
        L = channels[0].L
        blocks.append(ha.rr_matrix(K, L, from_set, to_set, grid))
    return linalg.block_diag(*blocks)


def pair_matrix(channels: list[Channel], pair=(1, 2), grid: AngularGrid = ha.DEFAULT_GRID) -> np.ndarray:
    """ln(cos alpha_pair) matrix over reference-set channels (all sharing L)."""
    pair = tuple(sorted(pair))
    C = c_constant_matrix(channels)
    own = PAIR_SETS[pair]
    if own == ha.REFERENCE_SET:
        return C.astype(complex)
    M = _block_rr(channels, ha.REFERENCE_SET, own, grid)
    return M.conj().T @ C @ M


def pair_angular_integral(c: Channel, cp: Channel, pair=(1, 2), grid: AngularGrid = ha.DEFAULT_GRID) -> PairIntegral:
    """Angular element of ln(|r_ij| / (kappa rho0)) between reference-set channels.

    Returns the coefficient of ln(rho/rho0) and the rho-independent constant.
    Channels with different L do not couple (the interaction conserves L).
    """
    if c.L != cp.L:
        return PairIntegral(0.0, 0.0, True)
    chans = ha.enumerate_channels(max(c.K, cp.K), c.L)
    i, j = chans.index(c), chans.index(cp)
    const = pair_matrix(chans, pair, grid)[i, j]
    return PairIntegral(1.0 if c == cp else 0.0, float(const.real))


@dataclass(frozen=True)
class CouplingDecomposition:
    """W(rho) = beta * (A ln(rho/rho0) + B) over symmetrized angular states.

    ``states`` lists (K, nu) for each row; ``pair_blocks`` keeps the three
    single-pair constant matrices (pairs 12, 23, 13) without the ln(kappa) shift.
    """

    A: np.ndarray
    B: np.ndarray
    states: tuple[tuple[int, int], ...]
    sector: str
    L: int
    pair_blocks: tuple[np.ndarray, np.ndarray, np.ndarray]

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def state_K(self) -> np.ndarray:
        return np.array([K for K, _ in self.states], dtype=int)

    def W(self, rho: float, beta: float = 1.0, rho0: float = 1.0) -> np.ndarray:
        return beta * (self.A * math.log(rho / rho0) + self.B)


def symmetrized_coefficients(K_max: int, L: int, sector: str, grid: AngularGrid = ha.DEFAULT_GRID):
    """Channel list, block coefficient matrix and (K, nu) labels for one sector."""
    channels = ha.enumerate_channels(K_max, L)
    blocks, states = [], []
    for K in sorted({c.K for c in channels}):
        sb = ha.symmetrize(K, L, sector, grid)
        blocks.append(np.asarray(sb.coefficients).reshape(len(sb.channels), sb.dim))
        states.extend((K, nu) for nu in range(sb.dim))
    C = linalg.block_diag(*blocks) if blocks else np.zeros((0, 0))
    return channels, C, tuple(states)


def assemble_coupling(
    K_max: int,
    L: int = 0,
    sector: str = "symmetric",
    grid: AngularGrid = ha.DEFAULT_GRID,
    separation_scale: float = SEPARATION_SCALE,
) -> CouplingDecomposition:
    """Sum the three pair terms through Raynal-Revai transforms and project
    onto the symmetrized states of ``sector``."""
    channels, C, states = symmetrized_coefficients(K_max, L, sector, grid)
    if not channels:
        raise ValueError(f"no channels with K <= {K_max} and L = {L}")
    if C.shape[0] != len(channels):
        raise ValueError("symmetrization/channel dimension mismatch")
    J = c_constant_matrix(channels)
    blocks, log_parts = [], []
    for pair in ((1, 2), (2, 3), (1, 3)):
        own = PAIR_SETS[pair]
        if own == ha.REFERENCE_SET:
            M = np.eye(len(channels))
        else:
            M = _block_rr(channels, ha.REFERENCE_SET, own, grid)
        blocks.append(C.conj().T @ (M.conj().T @ J @ M) @ C)
        log_parts.append(C.conj().T @ (M.conj().T @ M) @ C)
    A = _real_if_close(sum(log_parts))
    overlap = C.conj().T @ C
    B = _real_if_close(sum(blocks) + 3 * math.log(separation_scale) * overlap)
    return CouplingDecomposition(
        A=A,
        B=B,
        states=states,
        sector=sector,
        L=L,
        pair_blocks=tuple(_real_if_close(b) for b in blocks),
    )


def _real_if_close(m: np.ndarray, tol: float = 1e-13) -> np.ndarray:
    m = (m + m.conj().T) / 2
    if m.size and np.abs(m.imag).max() < tol:
        return np.ascontiguousarray(m.real)
    return m


def write_matrix_csv(path, matrix: np.ndarray, labels) -> None:
    """Dump a matrix with row/column labels; complex entries as a+bj strings."""
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["state", *[str(lab) for lab in labels]])
        for lab, row in zip(labels, matrix):
            w.writerow([str(lab), *[repr(complex(x)) if np.iscomplexobj(matrix) else repr(float(x)) for x in row]])
