#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
Feshbach resonance model: scattering length, binding energy,
open-channel factor χ and the Franck-Condon factor.

Conventions:

- a(B) = a_bg·(1 − ΔB/(B − B₀)), with ΔB signed.
- E_b = ħ²/(2μa²) and, equivalently, a = ħ/√(2μE_b).
- k = √(2μE_b)/ħ = 1/a. The often quoted relation k² = E_b/2μ
  misses ħ² and is not used.
- χ = 1 − |∂E_b/∂B|/Δμ, from the analytic derivative. The widespread
  closed form of χ has a stray 1/a_bg and the opposite sign, so it is
  only available through `closed_channel_factor_printed` for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike
from scipy import optimize

from feshrf.errors import DomainError, NoBoundStateError, PoleError
from feshrf.quantities import CONSTANTS, K40_RB87, SpeciesPair, to_si
from feshrf.trap import EffectiveTrap


@dataclass(frozen=True)
class ResonanceParams:
    """Parameters of one Feshbach resonance.

    Attributes:
        a_bg:
            Background scattering length in m.
        B0:
            Resonance position in T.
        DeltaB:
            Resonance width in T (signed).
        Delta_mu:
            Magnetic moment difference between molecular and atomic
            state in J/T.
        a_prime:
            Scattering length a′ of the colliding pair in m.
        pair:
            The two species.
    """

    a_bg: float
    B0: float
    DeltaB: float
    Delta_mu: float
    a_prime: float
    pair: SpeciesPair = K40_RB87

    def __post_init__(self) -> None:
        for name in ("a_bg", "DeltaB", "Delta_mu"):
            if getattr(self, name) == 0:
                raise DomainError(f"{name} must not be zero.")
        if self.a_prime <= 0:
            raise DomainError(f"a_prime must be positive, got {self.a_prime}.")

    @classmethod
    def from_lab(
        cls,
        a_bg_nm: float = 9.88,
        b0_gauss: float = 546.618,
        delta_b_gauss: float = 3.04,
        delta_mu_bohr: float = 2.32,
        a_prime_nm: float = 9.10,
        pair: SpeciesPair = K40_RB87,
    ) -> ResonanceParams:
        """Build from laboratory units, defaulting to 40K-87Rb at 546.6 G."""
        return cls(
            a_bg=to_si(a_bg_nm, "nm"),
            B0=to_si(b0_gauss, "G"),
            DeltaB=to_si(delta_b_gauss, "G"),
            Delta_mu=to_si(delta_mu_bohr, "mu_B"),
            a_prime=to_si(a_prime_nm, "nm"),
            pair=pair,
        )


@dataclass(frozen=True)
class BoundStateInfo:
    """The molecular state reached by the radio frequency.

    Attributes:
        E_b:
            Binding energy in J (positive).
        E_b_prime:
            ħ²/(2μa′²) in J.
        a:
            Scattering length consistent with E_b, in m.
        a_prime:
            Pair scattering length a′ in m.
        chi:
            Open-channel factor in [0, 1].
        k:
            √(2μE_b)/ħ = 1/a in 1/m.
        warnings:
            Model-validity notes collected while building the state.
    """

    E_b: float
    E_b_prime: float
    a: float
    a_prime: float
    chi: float
    k: float = field(init=False)
    warnings: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.E_b <= 0:
            raise DomainError(f"Binding energy must be positive: {self.E_b}.")
        if not 0.0 <= self.chi <= 1.0:
            raise DomainError(f"chi must lie in [0, 1], got {self.chi}.")
        object.__setattr__(self, "k", 1.0 / self.a)


def scattering_length(B: float, params: ResonanceParams) -> float:
    """a(B) = a_bg·(1 − ΔB/(B − B₀)).

    Raises:
        PoleError:
            If B equals B₀.
    """
    detuning = B - params.B0
    if detuning == 0:
        raise PoleError(f"B = {B} T is on the resonance pole.")
    return params.a_bg * (1.0 - params.DeltaB / detuning)


def binding_energy_from_length(a: float, pair: SpeciesPair) -> float:
    """E_b = ħ²/(2μa²) for a positive scattering length.

    Raises:
        NoBoundStateError:
            If a is not positive.
    """
    if a <= 0:
        raise NoBoundStateError(f"No bound state for scattering length {a} m.")
    return CONSTANTS.hbar**2 / (2.0 * pair.reduced_mass * a**2)


def length_from_binding_energy(E_b: float, pair: SpeciesPair) -> float:
    """a = ħ/√(2μE_b), the inverse of `binding_energy_from_length`."""
    if E_b <= 0:
        raise DomainError(f"Binding energy must be positive, got {E_b}.")
    return CONSTANTS.hbar / math.sqrt(2.0 * pair.reduced_mass * E_b)


def binding_energy_from_field(B: float, params: ResonanceParams) -> float:
    """E_b(B) = ħ²/(2μa(B)²)."""
    a = scattering_length(B, params)
    return binding_energy_from_length(a, params.pair)


def d_binding_energy_dB(B: float, params: ResonanceParams) -> float:
    """Analytic ∂E_b/∂B in J/T.

    ∂E_b/∂B = −ħ²/(μa³) · a_bg·ΔB/(B − B₀)²
    """
    a = scattering_length(B, params)
    if a <= 0:
        raise NoBoundStateError(f"No bound state at B = {B} T (a = {a} m).")
    da_dB = params.a_bg * params.DeltaB / (B - params.B0) ** 2
    return -(CONSTANTS.hbar**2) / (params.pair.reduced_mass * a**3) * da_dB


def _energy_slope(E_b: float, params: ResonanceParams) -> float:
    """|∂E_b/∂B| written through E_b itself.

    Eliminating B − B₀ with a(B) gives
    |∂E_b/∂B| = ħ²(a − a_bg)²/(μ a³ |ΔB·a_bg|), a = ħ/√(2μE_b).
    """
    a = length_from_binding_energy(E_b, params.pair)
    mu = params.pair.reduced_mass
    return (
        CONSTANTS.hbar**2
        * (a - params.a_bg) ** 2
        / (mu * a**3 * abs(params.DeltaB * params.a_bg))
    )


def _chi(E_b: float, params: ResonanceParams) -> Tuple[float, Optional[str]]:
    """χ clamped to [0, 1] and the warning raised by clamping, if any."""
    if E_b == 0:
        return 1.0, None
    raw = 1.0 - _energy_slope(E_b, params) / abs(params.Delta_mu)
    if 0.0 <= raw <= 1.0:
        return raw, None
    clamped = min(max(raw, 0.0), 1.0)
    message = (
        f"chi = {raw:.4g} outside [0, 1] at E_b = {E_b:.4g} J, "
        f"clamped to {clamped}; the linear approximation is invalid here."
    )
    return clamped, message


def closed_channel_factor(
    E_b: float,
    B: Optional[float],
    params: ResonanceParams,
    printed: bool = False,
) -> float:
    """Open-channel factor χ(E_b) = 1 − |∂E_b/∂B|/Δμ.

    Parameters:
        E_b:
            Binding energy in J; zero gives the universal limit χ = 1.
        B:
            Field in T selecting the bound branch. When given, the field
            must carry a bound state. `None` skips the check.
        params:
            Resonance parameters (a_bg, ΔB and Δμ enter).
        printed:
            Return the closed form found in the literature instead
            (diagnostics only, not clamped, see module notes).

    Raises:
        NoBoundStateError:
            If there is no molecule at B.
        DomainError:
            If E_b is negative.
    """
    if B is not None and scattering_length(B, params) <= 0:
        raise NoBoundStateError(f"No bound state at B = {B} T.")
    if E_b < 0:
        raise DomainError(f"Binding energy must be non-negative, got {E_b}.")
    if printed:
        return closed_channel_factor_printed(E_b, params)
    chi, warning = _chi(E_b, params)
    if warning:
        logger.warning(warning)
    return chi


def closed_channel_factor_printed(
    E_b: float, params: ResonanceParams
) -> float:
    """1 − ħ²k²(1 + k·a_bg)²/(Δμ·ΔB·μ·a_bg) with k = 1/a.

    Dimensionally inconsistent; kept to compare against the analytic χ.
    """
    if E_b == 0:
        return 1.0
    k = 1.0 / length_from_binding_energy(E_b, params.pair)
    mu = params.pair.reduced_mass
    return 1.0 - (CONSTANTS.hbar * k) ** 2 * (1.0 + k * params.a_bg) ** 2 / (
        params.Delta_mu * params.DeltaB * mu * params.a_bg
    )


def bound_state_from_energy(
    E_b: float,
    params: ResonanceParams,
    B: Optional[float] = None,
) -> BoundStateInfo:
    """Molecular state with a given binding energy.

    a and χ follow from E_b, E_b′ from a′.
    """
    pair = params.pair
    a = length_from_binding_energy(E_b, pair)
    if B is not None and scattering_length(B, params) <= 0:
        raise NoBoundStateError(f"No bound state at B = {B} T.")
    chi, warning = _chi(E_b, params)
    if warning:
        logger.warning(warning)
    return BoundStateInfo(
        E_b=E_b,
        E_b_prime=binding_energy_from_length(params.a_prime, pair),
        a=a,
        a_prime=params.a_prime,
        chi=chi,
        warnings=(warning,) if warning else (),
    )


def bound_state(B: float, params: ResonanceParams) -> BoundStateInfo:
    """Molecular state on the resonance branch at field B."""
    return bound_state_from_energy(
        binding_energy_from_field(B, params), params, B=B
    )


def franck_condon(
    eps_r: ArrayLike, bound: BoundStateInfo, trap: EffectiveTrap
) -> np.ndarray:
    """Franck-Condon factor between a colliding pair and the molecule.

    F_f = ħω̃·χ·(2/π)·(1 − a′/a)²·√ε_r·√E_b·E_b′/((ε_r+E_b)²(ε_r+E_b′))

    The ħω̃ normalizes the trapped scattering state, so F_f is dimensionless.
    """
    eps = np.asarray(eps_r, dtype=float)
    if np.any(eps < 0):
        raise DomainError(f"Relative energy must be non-negative: {eps_r}.")
    E_b, E_p = bound.E_b, bound.E_b_prime
    prefactor = (
        trap.quantum
        * bound.chi
        * (2.0 / math.pi)
        * (1.0 - bound.a_prime / bound.a) ** 2
        * math.sqrt(E_b)
        * E_p
    )
    return prefactor * np.sqrt(eps) / ((eps + E_b) ** 2 * (eps + E_p))


def franck_condon_peak(
    bound: BoundStateInfo, trap: EffectiveTrap
) -> Tuple[float, float]:
    """Position and value of the maximum of F_f over ε_r.

    The maximum sits near E_b/3 when E_b ≪ E_b′, so the search runs in
    units of E_b on [0, 10].
    """

    def negative(x: float) -> float:
        return -float(franck_condon(x * bound.E_b, bound, trap))

    found = optimize.minimize_scalar(
        negative,
        bounds=(0.0, 10.0),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return float(found.x) * bound.E_b, -float(found.fun)
