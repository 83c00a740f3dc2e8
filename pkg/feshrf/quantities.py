#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
Physical constants, unit conversions and species bookkeeping.

Everything inside feshrf is SI (J, s, T, kg, m, K).
Laboratory units (G, nK, kHz, nm, µs, u, μ_B) only appear at the
input/output boundaries, where `to_si` and `from_si` translate them.
Binding energies leave the package as E/h in kHz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict

from feshrf.errors import ConfigurationError, DomainError


@dataclass(frozen=True)
class PhysicalConstants:
    """Frozen constants (CODATA 2018, SI exact where defined).

    Attributes:
        planck_h:
            Planck constant h in J·s (exact).
        hbar:
            Reduced Planck constant h/2π in J·s.
        k_B:
            Boltzmann constant in J/K (exact).
        mu_B:
            Bohr magneton in J/T.
        amu:
            Atomic mass constant in kg.
    """

    planck_h: float = 6.62607015e-34
    k_B: float = 1.380649e-23
    mu_B: float = 9.2740100783e-24
    amu: float = 1.66053906660e-27
    hbar: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "hbar", self.planck_h / (2.0 * math.pi))
        for name in ("planck_h", "hbar", "k_B", "mu_B", "amu"):
            if getattr(self, name) <= 0:
                raise DomainError(f"Constant {name} must be positive.")


CONSTANTS = PhysicalConstants()

# Factors to SI, keyed by laboratory unit.
UNITS: Dict[str, float] = {
    # magnetic field -> T
    "T": 1.0,
    "G": 1e-4,
    "mG": 1e-7,
    # temperature -> K
    "K": 1.0,
    "uK": 1e-6,
    "µK": 1e-6,
    "μK": 1e-6,
    "nK": 1e-9,
    # frequency -> Hz
    "Hz": 1.0,
    "kHz": 1e3,
    "MHz": 1e6,
    # length -> m
    "m": 1.0,
    "nm": 1e-9,
    # time -> s
    "s": 1.0,
    "us": 1e-6,
    "µs": 1e-6,
    "μs": 1e-6,
    # mass -> kg
    "kg": 1.0,
    "amu": CONSTANTS.amu,
    "u": CONSTANTS.amu,
    # magnetic moment -> J/T
    "J/T": 1.0,
    "mu_B": CONSTANTS.mu_B,
    "μ_B": CONSTANTS.mu_B,
}


def _factor(unit: str) -> float:
    try:
        return UNITS[unit]
    except KeyError as exc:
        raise ConfigurationError(
            f"Unknown unit '{unit}', choose from {sorted(UNITS)}."
        ) from exc


def to_si(value: float, unit: str) -> float:
    """Convert a laboratory value to SI.

    Temperatures stay temperatures (K); use `thermal_energy` for k_B·T.

    Parameters:
        value:
            The number in laboratory units.
        unit:
            One of the keys of `UNITS`.

    Raises:
        ConfigurationError:
            If the unit is not supported.
    """
    return value * _factor(unit)


def from_si(value: float, unit: str) -> float:
    """Inverse of `to_si`."""
    return value / _factor(unit)


def thermal_energy(temperature: float) -> float:
    """k_B·T in J for a temperature in K."""
    if temperature <= 0:
        raise DomainError(f"Temperature must be positive, got {temperature}.")
    return CONSTANTS.k_B * temperature


def energy_to_khz(energy: float) -> float:
    """Express an energy as E/h in kHz."""
    return energy / CONSTANTS.planck_h / 1e3


def khz_to_energy(khz: float) -> float:
    """Energy in J for a frequency E/h given in kHz."""
    return khz * 1e3 * CONSTANTS.planck_h


def reduced_mass(mass_a: float, mass_b: float) -> float:
    """Reduced mass m_a·m_b/(m_a+m_b).

    Raises:
        DomainError:
            If any of the masses is not positive.
    """
    if mass_a <= 0 or mass_b <= 0:
        raise DomainError(
            f"Masses must be positive, got {mass_a} and {mass_b}."
        )
    if math.isinf(mass_b):
        return mass_a
    if math.isinf(mass_a):
        return mass_b
    return mass_a * mass_b / (mass_a + mass_b)


@dataclass(frozen=True)
class SpeciesPair:
    """The two atomic species of the mixture.

    Attributes:
        mass_a:
            Mass of species a in kg, the species driven by the radio
            frequency.
        mass_b:
            Mass of species b in kg.
        label_a:
            Identifier of species a, e.g. '40K'.
        label_b:
            Identifier of species b, e.g. '87Rb'.
        reduced_mass:
            μ = m_a·m_b/(m_a+m_b).
        total_mass:
            M = m_a + m_b.
    """

    mass_a: float
    mass_b: float
    label_a: str = "a"
    label_b: str = "b"
    reduced_mass: float = field(init=False)
    total_mass: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "reduced_mass", reduced_mass(self.mass_a, self.mass_b)
        )
        object.__setattr__(self, "total_mass", self.mass_a + self.mass_b)

    @classmethod
    def from_amu(
        cls,
        mass_a: float,
        mass_b: float,
        label_a: str = "a",
        label_b: str = "b",
    ) -> SpeciesPair:
        """Create a pair from masses in unified atomic mass units."""
        return cls(
            mass_a=to_si(mass_a, "amu"),
            mass_b=to_si(mass_b, "amu"),
            label_a=label_a,
            label_b=label_b,
        )


# Isotope masses in u.
K40_AMU = 39.9639985
RB87_AMU = 86.9091805

K40_RB87 = SpeciesPair.from_amu(K40_AMU, RB87_AMU, "40K", "87Rb")
