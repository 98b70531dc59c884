"""Mass-scaled Jacobi coordinates and kinematic rotations for three particles in 2D.

Set ``i`` pairs the two particles ``(j, k)`` that follow ``i`` cyclically:
set 1 -> (2, 3), set 2 -> (3, 1), set 3 -> (1, 2). With reduced mass
``mu = sqrt(m1 m2 m3 / M)``::

    X_i = sqrt(m_j m_k / ((m_j + m_k) mu)) (r_j - r_k)
    Y_i = sqrt(m_i (m_j + m_k) / (M mu)) (r_i - (m_j r_j + m_k r_k) / (m_j + m_k))
    R   = sum(m_i r_i) / sqrt(M mu)

so that ``sum(m_i r_i^2) = mu (X^2 + Y^2 + R^2)`` in every set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

EQUAL_MASSES = (1.0, 1.0, 1.0)


def pair_of_set(set_index: int) -> tuple[int, int]:
    """Particles (j, k) joined by the X vector of ``set_index``."""
    _check_set(set_index)
    return (set_index % 3 + 1, (set_index + 1) % 3 + 1)


def _check_set(set_index: int) -> None:
    if set_index not in (1, 2, 3):
        raise ValueError(f"Jacobi set index must be 1, 2 or 3, got {set_index}")


def reduced_mass(masses=EQUAL_MASSES) -> float:
    m1, m2, m3 = masses
    return math.sqrt(m1 * m2 * m3 / (m1 + m2 + m3))


@dataclass(frozen=True)
class JacobiVectors:
    X: np.ndarray
    Y: np.ndarray
    R: np.ndarray
    set_index: int

    def __post_init__(self):
        _check_set(self.set_index)
        for v in (self.X, self.Y, self.R):
            if not np.all(np.isfinite(v)):
                raise ValueError("Jacobi vectors must be finite")


@dataclass(frozen=True)
class HyperPoint:
    rho: float
    alpha: float
    phi1: float
    phi2: float
    set_index: int
    degenerate: bool = False


def to_jacobi(r1, r2, r3, set_index: int, masses=EQUAL_MASSES) -> JacobiVectors:
    _check_set(set_index)
    r = [np.asarray(v, dtype=float) for v in (r1, r2, r3)]
    m = masses
    M = sum(m)
    mu = reduced_mass(m)
    i = set_index - 1
    j, k = (i + 1) % 3, (i + 2) % 3
    mjk = m[j] + m[k]
    X = math.sqrt(m[j] * m[k] / (mjk * mu)) * (r[j] - r[k])
    Y = math.sqrt(m[i] * mjk / (M * mu)) * (r[i] - (m[j] * r[j] + m[k] * r[k]) / mjk)
    R = (m[0] * r[0] + m[1] * r[1] + m[2] * r[2]) / math.sqrt(M * mu)
    return JacobiVectors(X, Y, R, set_index)


def from_jacobi(v: JacobiVectors, masses=EQUAL_MASSES) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Invert :func:`to_jacobi`; returns particle positions (r1, r2, r3)."""
    m = masses
    M = sum(m)
    mu = reduced_mass(m)
    i = v.set_index - 1
    j, k = (i + 1) % 3, (i + 2) % 3
    mjk = m[j] + m[k]
    d_jk = v.X / math.sqrt(m[j] * m[k] / (mjk * mu))
    d_i = v.Y / math.sqrt(m[i] * mjk / (M * mu))
    cm = v.R * math.sqrt(M * mu) / M
    r = [None, None, None]
    # r_i - cm = d_i * mjk / M ; cm_jk - cm = -d_i * m_i / M
    r[i] = cm + d_i * mjk / M
    cm_jk = cm - d_i * m[i] / M
    r[j] = cm_jk + d_jk * m[k] / mjk
    r[k] = cm_jk - d_jk * m[j] / mjk
    return r[0], r[1], r[2]


def permutation_parity(i: int, k: int) -> int:
    """0 when set k follows set i cyclically (1->2->3->1), 1 otherwise."""
    _check_set(i)
    _check_set(k)
    if i == k:
        raise ValueError("kinematic angle needs two distinct sets")
    return 0 if k == i % 3 + 1 else 1


def kinematic_angle(i: int, k: int, masses=EQUAL_MASSES) -> float:
    """arctan[(-1)^p sqrt(m_j M / (m_k m_i))], the principal-branch kinematic angle.

    The arctangent fixes the angle only modulo pi; for equal masses it is
    +-pi/3. :func:`rotation_angle` gives the branch that actually carries
    set ``i`` onto set ``k`` for the vector conventions of this module.
    """
    p = permutation_parity(i, k)
    j = 6 - i - k
    m = masses
    M = sum(m)
    return math.atan((-1) ** p * math.sqrt(m[j - 1] * M / (m[k - 1] * m[i - 1])))


def rotation_angle(i: int, k: int, masses=EQUAL_MASSES) -> float:
    """Angle phi with (X_k, Y_k) = rotate((X_i, Y_i), phi) exactly.

    Equals :func:`kinematic_angle` shifted by pi, because cos(phi) =
    -sqrt(m_i m_k / ((M - m_i)(M - m_k))) is negative in this convention.
    """
    phi = kinematic_angle(i, k, masses)
    return phi - math.pi if phi > 0 else phi + math.pi


def rotation_matrix(phi: float) -> np.ndarray:
    """2x2 matrix T acting on (X, Y) as [X', Y'] = T [X, Y]."""
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, s], [-s, c]])


def rotate_jacobi(v: JacobiVectors, phi: float, new_set: int | None = None) -> JacobiVectors:
    c, s = math.cos(phi), math.sin(phi)
    X = v.X * c + v.Y * s
    Y = -v.X * s + v.Y * c
    return replace(v, X=X, Y=Y, set_index=v.set_index if new_set is None else new_set)


def transform_set(v: JacobiVectors, to_set: int, masses=EQUAL_MASSES) -> JacobiVectors:
    if to_set == v.set_index:
        return v
    return rotate_jacobi(v, rotation_angle(v.set_index, to_set, masses), to_set)


def hyperradius(v: JacobiVectors) -> float:
    return float(math.sqrt(np.dot(v.X, v.X) + np.dot(v.Y, v.Y)))


def to_hyperspherical(v: JacobiVectors) -> HyperPoint:
    x = float(np.hypot(*v.X))
    y = float(np.hypot(*v.Y))
    rho = math.hypot(x, y)
    degenerate = x == 0.0 or y == 0.0
    alpha = math.atan2(y, x) if rho > 0 else 0.0
    phi1 = math.atan2(v.X[1], v.X[0]) % (2 * math.pi) if x > 0 else 0.0
    phi2 = math.atan2(v.Y[1], v.Y[0]) % (2 * math.pi) if y > 0 else 0.0
    return HyperPoint(rho, alpha, phi1, phi2, v.set_index, degenerate)


def from_hyperspherical(p: HyperPoint, R=(0.0, 0.0)) -> JacobiVectors:
    x = p.rho * math.cos(p.alpha)
    y = p.rho * math.sin(p.alpha)
    X = np.array([x * math.cos(p.phi1), x * math.sin(p.phi1)])
    Y = np.array([y * math.cos(p.phi2), y * math.sin(p.phi2)])
    return JacobiVectors(X, Y, np.asarray(R, dtype=float), p.set_index)


def permutation_map(perm: tuple[int, int, int], set_index: int = 3, masses=EQUAL_MASSES) -> np.ndarray:
    """2x2 matrix T with (X', Y') = T (X, Y), where primes denote the Jacobi
    vectors of the relabelled configuration r'_a = r_{perm[a]} (1-based).

    Built directly from positions, so transpositions come out as a
    kinematic rotation times the reflection X -> -X.
    """
    T = np.empty((2, 2))
    for col, (X, Y) in enumerate((((1.0, 0.0), (0.0, 0.0)), ((0.0, 0.0), (1.0, 0.0)))):
        v = JacobiVectors(np.array(X), np.array(Y), np.zeros(2), set_index)
        r = from_jacobi(v, masses)
        rp = [r[perm[a] - 1] for a in range(3)]
        w = to_jacobi(*rp, set_index, masses)
        T[0, col] = w.X[0]
        T[1, col] = w.Y[0]
    return T
