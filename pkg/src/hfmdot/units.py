"""Physical parameters and conversion to dimensionless oscillator units.

Internal units used throughout the package:

* energy in units of the bare confinement quantum hbar*omega0,
* length in units of b0 = sqrt(hbar / (mu * omega0)), measured in the
  mass-scaled Jacobi coordinates (mu = m*/sqrt(3) for three electrons).

With these units the relative-motion oscillator has Gaussian width
``alpha = omega_eff / omega0`` and the field-free width is exactly 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import constants as _sc

# eV*T^-1 -> meV/T
BOHR_MAGNETON_MEV_PER_T = _sc.physical_constants["Bohr magneton in eV/T"][0] * 1e3
# MeV*fm == eV*nm
HBAR_C_EV_NM = _sc.physical_constants["reduced Planck constant times c in MeV fm"][0]
ELECTRON_MASS_EV = _sc.physical_constants["electron mass energy equivalent in MeV"][0] * 1e6
# e^2 / (4 pi eps0) in meV*nm
COULOMB_MEV_NM = _sc.fine_structure * HBAR_C_EV_NM * 1e3

# mass-scaled reduced mass for three equal masses: mu / m = 1/sqrt(3)
THREE_BODY_MU_RATIO = 1.0 / math.sqrt(3.0)


@dataclass(frozen=True)
class MaterialParams:
    m_eff_ratio: float = 0.067
    epsilon_r: float = 12.0

    def __post_init__(self):
        if not self.m_eff_ratio > 0:
            raise ValueError(f"m_eff_ratio must be positive, got {self.m_eff_ratio}")
        if not self.epsilon_r > 0:
            raise ValueError(f"epsilon_r must be positive, got {self.epsilon_r}")


GAAS = MaterialParams(0.067, 12.0)


@dataclass(frozen=True)
class DotConfig:
    """Physical description of one dot at one field value.

    ``beta`` is the prefactor of each pair term beta*ln(|r_ij|/rho0) in meV;
    ``None`` selects :func:`default_beta`. ``rho0`` is in internal length
    units (b0).
    """

    hbar_omega0: float = 5.0
    b_field: float = 0.0
    beta: float | None = None
    rho0: float = 1.0
    material: MaterialParams = field(default_factory=lambda: GAAS)

    def __post_init__(self):
        if not self.hbar_omega0 > 0:
            raise ValueError(f"hbar_omega0 must be positive, got {self.hbar_omega0}")
        if not self.rho0 > 0:
            raise ValueError(f"rho0 must be positive, got {self.rho0}")
        if self.b_field < 0:
            raise ValueError("b_field must be non-negative; orientation enters through L_z")
        if self.beta is not None and not (math.isfinite(self.beta) and self.beta >= 0):
            raise ValueError(f"beta must be finite and non-negative, got {self.beta}")

    @property
    def beta_mev(self) -> float:
        if self.beta is None:
            return default_beta(self.hbar_omega0, self.material)
        return self.beta

    @property
    def frequencies(self) -> "Frequencies":
        return frequencies(self.hbar_omega0, self.b_field, self.material)


@dataclass(frozen=True)
class Frequencies:
    """Angular frequencies expressed as energies hbar*omega, in meV."""

    omega0: float
    omega_L: float
    omega_eff: float

    @property
    def width(self) -> float:
        """Oscillator width alpha in internal units (omega_eff / omega0)."""
        return self.omega_eff / self.omega0

    @property
    def larmor_ratio(self) -> float:
        return self.omega_L / self.omega0


def larmor_frequency(b_field: float, material: MaterialParams = GAAS) -> float:
    """hbar*omega_L = hbar e B / (2 m*) in meV."""
    if b_field < 0:
        raise ValueError("b_field must be non-negative")
    return BOHR_MAGNETON_MEV_PER_T * b_field / material.m_eff_ratio


def effective_frequency(omega0: float, omega_L: float) -> float:
    if omega0 < 0 or omega_L < 0:
        raise ValueError("frequencies must be non-negative")
    return math.hypot(omega0, omega_L)


def frequencies(hbar_omega0: float, b_field: float, material: MaterialParams = GAAS) -> Frequencies:
    wl = larmor_frequency(b_field, material)
    return Frequencies(hbar_omega0, wl, effective_frequency(hbar_omega0, wl))


def oscillator_length(hbar_omega0: float, material: MaterialParams = GAAS) -> float:
    """Single-electron oscillator length sqrt(hbar / (m* omega0)) in nm."""
    if not hbar_omega0 > 0:
        raise ValueError("hbar_omega0 must be positive")
    mc2 = material.m_eff_ratio * ELECTRON_MASS_EV
    return math.sqrt(HBAR_C_EV_NM**2 / (mc2 * hbar_omega0 * 1e-3))


def internal_length_unit(hbar_omega0: float, material: MaterialParams = GAAS) -> float:
    """b0 = sqrt(hbar / (mu omega0)) in nm, the internal unit for rho and rho0."""
    return oscillator_length(hbar_omega0, material) / math.sqrt(THREE_BODY_MU_RATIO)


def default_beta(hbar_omega0: float, material: MaterialParams = GAAS) -> float:
    """e^2 / (eps_r * l0) in meV, the natural interaction scale of the dot."""
    return COULOMB_MEV_NM / (material.epsilon_r * oscillator_length(hbar_omega0, material))


def to_internal_energy(energy_mev: float, hbar_omega0: float) -> float:
    return energy_mev / hbar_omega0


def from_internal_energy(energy: float, hbar_omega0: float) -> float:
    return energy * hbar_omega0


def to_internal_length(length_nm: float, hbar_omega0: float, material: MaterialParams = GAAS) -> float:
    return length_nm / internal_length_unit(hbar_omega0, material)


def from_internal_length(length: float, hbar_omega0: float, material: MaterialParams = GAAS) -> float:
    return length * internal_length_unit(hbar_omega0, material)
