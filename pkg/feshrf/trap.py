#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
Pair statistics of a thermal two-species mixture in a harmonic trap.

两种原子在谐振势阱中的配对统计。

Two uncoupled 3D oscillators (one per species) are rewritten as a
relative and a center-of-mass oscillator, both with the per-axis mean
frequencies ω̄_i = √(ω_a,i·ω_b,i). The coupling term between the two is
proportional to ω_a,i − ω_b,i and is dropped; `mismatch_ratio` reports
how large the per-axis mismatch is.

Energies are continuous (thermodynamic limit), so every density here is
a smooth function of energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate

try:
    from typing import TypeAlias
except ImportError:
    from typing_extensions import TypeAlias

from feshrf.errors import DomainError, NumericalError
from feshrf.quantities import CONSTANTS, thermal_energy

Axes: TypeAlias = Tuple[float, float, float]
Frequencies: TypeAlias = Union[float, Sequence[float]]


def _axes(value: Frequencies, name: str) -> Axes:
    """One isotropic value or three per-axis values as a 3-tuple."""
    values = np.atleast_1d(np.asarray(value, dtype=float)).ravel()
    if values.size == 1:
        values = np.repeat(values, 3)
    if values.size != 3:
        raise DomainError(f"{name} needs 1 or 3 frequencies, got {values}.")
    if np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise DomainError(f"{name} frequencies must be positive: {values}.")
    return (float(values[0]), float(values[1]), float(values[2]))


def _non_negative(energy: ArrayLike, name: str) -> np.ndarray:
    array = np.asarray(energy, dtype=float)
    if np.any(array < 0):
        raise DomainError(f"{name} must be non-negative, got {energy}.")
    return array


@dataclass(frozen=True)
class TrapConfig:
    """Angular trap frequencies (rad/s) of both species along three axes."""

    omega_a: Axes
    omega_b: Axes

    def __post_init__(self) -> None:
        object.__setattr__(self, "omega_a", _axes(self.omega_a, "omega_a"))
        object.__setattr__(self, "omega_b", _axes(self.omega_b, "omega_b"))

    @classmethod
    def from_hz(cls, freq_a: Frequencies, freq_b: Frequencies) -> TrapConfig:
        """Build from ordinary frequencies ν = ω/2π in Hz.

        A single value per species is read as an isotropic (mean) trap.
        """
        two_pi = 2.0 * math.pi
        omega_a = tuple(two_pi * f for f in _axes(freq_a, "freq_a"))
        omega_b = tuple(two_pi * f for f in _axes(freq_b, "freq_b"))
        return cls(omega_a=omega_a, omega_b=omega_b)  # type: ignore[arg-type]

    @classmethod
    def matched(cls, omega: Frequencies) -> TrapConfig:
        """Both species in the same trap, without any coupling term."""
        axes = _axes(omega, "omega")
        return cls(omega_a=axes, omega_b=axes)


@dataclass(frozen=True)
class EffectiveTrap:
    """Mean trap of the pair Hamiltonian.

    Attributes:
        omega_bar:
            Per-axis geometric means √(ω_a,i·ω_b,i) in rad/s.
        omega_tilde:
            Geometric mean of the three ω̄_i in rad/s.
    """

    omega_bar: Axes
    omega_tilde: float

    @classmethod
    def isotropic(cls, omega: float) -> EffectiveTrap:
        """An effective trap with the same frequency on every axis."""
        return effective_trap(TrapConfig.matched(omega))

    @property
    def quantum(self) -> float:
        """ħω̃ in J."""
        return CONSTANTS.hbar * self.omega_tilde


@dataclass(frozen=True)
class MixtureState:
    """Atom numbers and temperature of the mixture."""

    n_a: float
    n_b: float
    temperature: float

    def __post_init__(self) -> None:
        if self.n_a < 0 or self.n_b < 0:
            raise DomainError(
                f"Atom numbers must be non-negative: {self.n_a}, {self.n_b}."
            )
        if self.temperature <= 0:
            raise DomainError(
                f"Temperature must be positive, got {self.temperature}."
            )

    @property
    def kT(self) -> float:
        """k_B·T in J."""
        return thermal_energy(self.temperature)


def effective_trap(cfg: TrapConfig) -> EffectiveTrap:
    """Per-axis geometric means and their geometric mean."""
    omega_bar = tuple(
        math.sqrt(wa * wb) for wa, wb in zip(cfg.omega_a, cfg.omega_b)
    )
    omega_tilde = math.prod(omega_bar) ** (1.0 / 3.0)
    return EffectiveTrap(
        omega_bar=omega_bar, omega_tilde=omega_tilde  # type: ignore[arg-type]
    )


def mismatch_ratio(cfg: TrapConfig) -> Axes:
    """Per-axis relative mismatch max(ω_a/ω_b, ω_b/ω_a) − 1.

    Zero on every axis means the relative and center-of-mass motions
    decouple exactly.
    """
    return tuple(  # type: ignore[return-value]
        max(wa / wb, wb / wa) - 1.0 for wa, wb in zip(cfg.omega_a, cfg.omega_b)
    )


def single_atom_occupation(
    eps: ArrayLike,
    n: float,
    trap: Union[EffectiveTrap, Frequencies],
    temperature: float,
) -> np.ndarray:
    """Maxwell-Boltzmann occupation per state of one species.

    f(ε) = N·ħ³ω₁ω₂ω₃/(k_BT)³·exp(−ε/k_BT)

    Parameters:
        eps:
            Single-atom energy in J.
        n:
            Number of atoms.
        trap:
            Either an `EffectiveTrap` or the three angular frequencies
            of the species (one value means isotropic).
        temperature:
            Temperature in K.

    Raises:
        DomainError:
            If ε is negative.
    """
    eps = _non_negative(eps, "Energy")
    if isinstance(trap, EffectiveTrap):
        omegas = trap.omega_bar
    else:
        omegas = _axes(trap, "trap")
    kT = thermal_energy(temperature)
    prefactor = n * math.prod(CONSTANTS.hbar * w / kT for w in omegas)
    return prefactor * np.exp(-eps / kT)


def pair_occupation(
    eps_t: ArrayLike, mix: MixtureState, trap: EffectiveTrap
) -> np.ndarray:
    """Number of atom pairs per state at total energy ε_t.

    f_p(ε_t) = N_a·N_b·(ħω̃/k_BT)⁶·exp(−ε_t/k_BT)
    """
    eps_t = _non_negative(eps_t, "Total energy")
    ratio = trap.quantum / mix.kT
    return mix.n_a * mix.n_b * ratio**6 * np.exp(-eps_t / mix.kT)


def dos_center_of_mass(eps_cm: ArrayLike, trap: EffectiveTrap) -> np.ndarray:
    """Density of states ε²/(2(ħω̃)³) of the center-of-mass oscillator."""
    eps_cm = _non_negative(eps_cm, "Center-of-mass energy")
    return eps_cm**2 / (2.0 * trap.quantum**3)


def dos_swave(trap: EffectiveTrap) -> float:
    """s-wave density of states 1/(2ħω̃) of the relative motion.

    Independent of the relative energy.
    """
    return 1.0 / (2.0 * trap.quantum)


def pair_energy_density(
    eps_r: ArrayLike, mix: MixtureState, trap: EffectiveTrap
) -> np.ndarray:
    """Number of colliding s-wave pairs per relative energy.

    h(ε_r) = N_a·N_b·(ħω̃)²/(2(k_BT)³)·exp(−ε_r/k_BT)

    This is the closed form of ∫ g_cm·g_r·f_p(ε_r+ε_cm) dε_cm;
    `pair_energy_density_quadrature` evaluates the integral itself.
    """
    eps_r = _non_negative(eps_r, "Relative energy")
    kT = mix.kT
    prefactor = mix.n_a * mix.n_b * trap.quantum**2 / (2.0 * kT**3)
    return prefactor * np.exp(-eps_r / kT)


def pair_energy_density_quadrature(
    eps_r: float,
    mix: MixtureState,
    trap: EffectiveTrap,
    rel_tol: float = 1e-10,
) -> float:
    """h(ε_r) by integrating g_cm·g_r·f_p over the center-of-mass energy.

    The integral runs in units of k_BT so that QUADPACK sees numbers of
    order one.
    """
    eps_r = float(_non_negative(eps_r, "Relative energy"))
    kT = mix.kT
    g_r = dos_swave(trap)

    def integrand(y: float) -> float:
        eps_cm = y * kT
        return float(
            dos_center_of_mass(eps_cm, trap)
            * g_r
            * pair_occupation(eps_r + eps_cm, mix, trap)
        )

    result = integrate.quad(
        integrand, 0.0, np.inf, epsabs=0.0, epsrel=rel_tol, full_output=1
    )
    if len(result) == 4:
        raise NumericalError(
            f"Center-of-mass integral did not converge: {result[3]}",
            estimate=result[0] * kT,
            abserr=result[1] * kT,
        )
    return result[0] * kT


def total_pair_number(mix: MixtureState, trap: EffectiveTrap) -> float:
    """∫₀^∞ h(ε_r) dε_r = N_a·N_b·(ħω̃)²/(2(k_BT)²)."""
    return mix.n_a * mix.n_b * trap.quantum**2 / (2.0 * mix.kT**2)
