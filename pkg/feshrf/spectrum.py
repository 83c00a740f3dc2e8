#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
Molecule number versus radio frequency.

N_mol(ν) = λ·(π/2)·Ω²τ² ∫₀^∞ h(ε_r)·F_f(ε_r)
           · exp(−(hν − E_b − E₀ − ε_r)²τ²/ħ²) dε_r

h(ε_r) is in 1/J and F_f is dimensionless, so N_mol is a plain count.
The integral is evaluated in units of k_BT (x = ε_r/k_BT), where it reads

    λ·(π/2)·Ω²τ²·h₀·F₀ ∫ √x·exp(−x − s²(x − d)²)/((x + e_b)²(x + e_p)) dx

with s = k_BT·τ/ħ, d = (hν − E₀ − E_b)/k_BT, e_b = E_b/k_BT and
e_p = E_b′/k_BT. The Gaussian factor is below e^−64 outside
[max(0, d − w), max(d, 0) + w], w = window/s, so only that interval
is integrated.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Literal, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger
from numpy.typing import ArrayLike
from scipy import integrate, optimize

try:
    from typing import TypeAlias
except ImportError:
    from typing_extensions import TypeAlias

from feshrf.errors import DataError, DomainError, FeshRFError, NumericalError
from feshrf.quantities import CONSTANTS, to_si
from feshrf.resonance import (
    BoundStateInfo,
    ResonanceParams,
    bound_state_from_energy,
    franck_condon,
    franck_condon_peak,
)
from feshrf.tools.func import is_strictly_increasing, worker_count
from feshrf.trap import EffectiveTrap, MixtureState, pair_energy_density

Rule: TypeAlias = Literal["adaptive", "fixed"]
Seed: TypeAlias = Union[int, np.random.Generator, None]

PERTURBATIVE_LIMIT = 0.5


@dataclass(frozen=True)
class PulseParams:
    """Gaussian radio-frequency pulse.

    Attributes:
        rabi:
            Peak Rabi frequency Ω of the atomic transition in rad/s.
        tau:
            Pulse duration τ in s.
        E0:
            Energy of the atomic transition in J (ν₀ = E0/h).
    """

    rabi: float
    tau: float
    E0: float = 0.0

    def __post_init__(self) -> None:
        if self.rabi < 0:
            raise DomainError(f"Rabi frequency must be >= 0, got {self.rabi}.")
        if self.tau <= 0:
            raise DomainError(f"Pulse duration must be > 0, got {self.tau}.")

    @classmethod
    def from_lab(
        cls,
        rabi_khz: float = 45.0,
        tau_us: float = 25.0,
        atomic_line_hz: float = 0.0,
    ) -> PulseParams:
        """Ω/2π in kHz, τ in µs and the atomic line ν₀ in Hz."""
        return cls(
            rabi=2.0 * math.pi * to_si(rabi_khz, "kHz"),
            tau=to_si(tau_us, "us"),
            E0=CONSTANTS.planck_h * atomic_line_hz,
        )

    @property
    def atomic_line(self) -> float:
        """ν₀ in Hz."""
        return self.E0 / CONSTANTS.planck_h


@dataclass(frozen=True)
class QuadratureSettings:
    """How the integral over the relative energy is evaluated.

    Attributes:
        rel_tol:
            Relative tolerance of the adaptive rule.
        abs_tol:
            Absolute tolerance (in units of the dimensionless integral).
        limit:
            Maximal number of subintervals of the adaptive rule.
        window:
            Half width of the integration interval in units of ħ/τ.
        rule:
            'adaptive' (QUADPACK Gauss-Kronrod) or 'fixed'
            (composite Gauss-Legendre, for reproducibility checks).
        fixed_order:
            Gauss-Legendre nodes per panel of the fixed rule.
        fixed_panels:
            Panels on each side of the Gaussian center for the fixed rule.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 0.0
    limit: int = 200
    window: float = 8.0
    rule: Rule = "adaptive"
    fixed_order: int = 64
    fixed_panels: int = 16

    def __post_init__(self) -> None:
        if self.rule not in ("adaptive", "fixed"):
            raise DomainError(f"Unknown quadrature rule '{self.rule}'.")
        if self.rel_tol <= 0 or self.window <= 0:
            raise DomainError("Quadrature tolerance and window must be > 0.")


@dataclass(frozen=True)
class ModelConfig:
    """Everything needed to evaluate a spectrum.

    Attributes:
        mix:
            Atom numbers and temperature.
        trap:
            Effective trap of the pair.
        pulse:
            Radio-frequency pulse.
        bound:
            Target molecular state.
        scale:
            Scale factor λ between model and measurement (default 1).
        resonance:
            Resonance parameters; required to rebuild `bound` from a
            trial binding energy while fitting.
        field:
            Magnetic field in T at which the spectrum is taken.
        quadrature:
            Integration settings.
    """

    mix: MixtureState
    trap: EffectiveTrap
    pulse: PulseParams
    bound: BoundStateInfo
    scale: float = 1.0
    resonance: Optional[ResonanceParams] = None
    field: Optional[float] = None
    quadrature: QuadratureSettings = dataclasses.field(
        default_factory=QuadratureSettings
    )

    def __post_init__(self) -> None:
        if self.scale < 0:
            raise DomainError(f"Scale factor must be >= 0, got {self.scale}.")

    def with_scale(self, scale: float) -> ModelConfig:
        """Copy with another λ."""
        return replace(self, scale=scale)

    def with_binding_energy(self, E_b: float) -> ModelConfig:
        """Copy whose molecule has binding energy E_b.

        a, E_b′ and χ are recomputed from the resonance parameters.
        """
        if self.resonance is None:
            raise DomainError(
                "Resonance parameters are needed to rebuild the bound state."
            )
        bound = bound_state_from_energy(E_b, self.resonance)
        return replace(self, bound=bound)

    def with_resonance(
        self, resonance: ResonanceParams, field: Optional[float] = None
    ) -> ModelConfig:
        """Copy with other resonance parameters; χ follows the new width."""
        cfg = replace(
            self,
            resonance=resonance,
            field=self.field if field is None else field,
        )
        return cfg.with_binding_energy(self.bound.E_b)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Molecule numbers on a strictly increasing frequency grid.

    Attributes:
        frequency:
            Radio frequencies ν in Hz.
        counts:
            Molecule numbers.
        uncertainty:
            Optional 1σ uncertainties of the counts.
    """

    frequency: np.ndarray
    counts: np.ndarray
    uncertainty: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        frequency = np.asarray(self.frequency, dtype=float).ravel()
        counts = np.asarray(self.counts, dtype=float).ravel()
        if frequency.size != counts.size:
            raise DataError(
                f"{frequency.size} frequencies but {counts.size} counts."
            )
        if not is_strictly_increasing(frequency):
            raise DataError("Frequencies must be strictly increasing.")
        object.__setattr__(self, "frequency", frequency)
        object.__setattr__(self, "counts", counts)
        if self.uncertainty is not None:
            sigma = np.asarray(self.uncertainty, dtype=float).ravel()
            if sigma.size != counts.size:
                raise DataError("Uncertainties and counts differ in length.")
            object.__setattr__(self, "uncertainty", sigma)

    def __len__(self) -> int:
        return int(self.frequency.size)

    def __repr__(self) -> str:
        return f"<Spectrum: {len(self)} points>"

    def scaled(self, factor: float) -> Spectrum:
        """Counts (and uncertainties) multiplied by a factor."""
        sigma = None if self.uncertainty is None else self.uncertainty * factor
        return Spectrum(self.frequency, self.counts * factor, sigma)

    def to_frame(self) -> pd.DataFrame:
        """Table with the CSV column names."""
        data = {
            "rf_frequency_hz": self.frequency,
            "molecule_count": self.counts,
        }
        if self.uncertainty is not None:
            data["count_uncertainty"] = self.uncertainty
        return pd.DataFrame(data)


@dataclass(frozen=True)
class _Kernel:
    """Constants of the dimensionless integrand at one frequency."""

    prefactor: float
    s: float
    d: float
    e_b: float
    e_p: float
    w: float

    @classmethod
    def build(cls, nu: float, cfg: ModelConfig) -> _Kernel:
        kT = cfg.mix.kT
        bound = cfg.bound
        hbar_omega = cfg.trap.quantum
        e_b = bound.E_b / kT
        e_p = bound.E_b_prime / kT
        h0 = cfg.mix.n_a * cfg.mix.n_b * hbar_omega**2 / (2.0 * kT**3)
        f0 = (
            hbar_omega
            * bound.chi
            * (2.0 / math.pi)
            * (1.0 - bound.a_prime / bound.a) ** 2
            * math.sqrt(e_b)
            * e_p
        )
        pulse = cfg.pulse
        prefactor = (
            cfg.scale
            * (math.pi / 2.0)
            * (pulse.rabi * pulse.tau) ** 2
            * h0
            * f0
        )
        s = kT * pulse.tau / CONSTANTS.hbar
        detuning = CONSTANTS.planck_h * nu - pulse.E0 - bound.E_b
        return cls(
            prefactor=prefactor,
            s=s,
            d=detuning / kT,
            e_b=e_b,
            e_p=e_p,
            w=cfg.quadrature.window / s,
        )

    @property
    def interval(self) -> Tuple[float, float]:
        return max(0.0, self.d - self.w), max(self.d, 0.0) + self.w

    def scalar(self, x: float) -> float:
        return (
            math.sqrt(x)
            * math.exp(-x - (self.s * (x - self.d)) ** 2)
            / ((x + self.e_b) ** 2 * (x + self.e_p))
        )

    def vector(self, x: np.ndarray) -> np.ndarray:
        return (
            np.sqrt(x)
            * np.exp(-x - (self.s * (x - self.d)) ** 2)
            / ((x + self.e_b) ** 2 * (x + self.e_p))
        )


def _adaptive(kernel: _Kernel, settings: QuadratureSettings) -> float:
    lo, hi = kernel.interval
    points = [kernel.d] if lo < kernel.d < hi else None
    result = integrate.quad(
        kernel.scalar,
        lo,
        hi,
        points=points,
        epsabs=settings.abs_tol,
        epsrel=settings.rel_tol,
        limit=settings.limit,
        full_output=1,
    )
    if len(result) == 4:
        raise NumericalError(
            f"Quadrature did not converge: {result[3]}",
            estimate=result[0] * kernel.prefactor,
            abserr=result[1] * kernel.prefactor,
        )
    return result[0]


def _fixed(kernel: _Kernel, settings: QuadratureSettings) -> float:
    lo, hi = kernel.interval
    cuts = [lo, kernel.d, hi] if lo < kernel.d < hi else [lo, hi]
    total = 0.0
    for left, right in zip(cuts[:-1], cuts[1:]):
        edges = np.linspace(left, right, settings.fixed_panels + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            value, _ = integrate.fixed_quad(
                kernel.vector, a, b, n=settings.fixed_order
            )
            total += value
    return total


def molecule_number(nu: float, cfg: ModelConfig) -> float:
    """Number of molecules associated by a pulse at radio frequency ν.

    Parameters:
        nu:
            Radio frequency in Hz.
        cfg:
            Model configuration.

    Raises:
        NumericalError:
            If the adaptive quadrature misses its tolerance.

    Returns:
        λ·(π/2)·Ω²τ²·∫ h·G·F_f dε_r.
    """
    kernel = _Kernel.build(nu, cfg)
    if kernel.prefactor == 0.0:
        return 0.0
    if cfg.quadrature.rule == "fixed":
        value = _fixed(kernel, cfg.quadrature)
    else:
        value = _adaptive(kernel, cfg.quadrature)
    return kernel.prefactor * value


def compute_spectrum(
    grid: ArrayLike, cfg: ModelConfig, threads: Optional[int] = None
) -> Spectrum:
    """Model spectrum on a frequency grid.

    Points are independent and spread over a thread pool of `threads`
    workers (all cores when None); the result does not depend on the
    number of threads.

    Raises:
        DataError:
            If the grid is empty or not strictly increasing.
        NumericalError:
            Carrying the index of the failing grid point.
    """
    frequencies = np.asarray(grid, dtype=float).ravel()
    if frequencies.size == 0:
        raise DataError("The frequency grid is empty.")
    if not is_strictly_increasing(frequencies):
        raise DataError("The frequency grid must be strictly increasing.")

    def evaluate(item: Tuple[int, float]) -> float:
        index, nu = item
        try:
            return molecule_number(nu, cfg)
        except NumericalError as exc:
            raise NumericalError(
                str(exc), exc.estimate, exc.abserr, index=index
            ) from exc

    items = list(enumerate(frequencies))
    workers = min(worker_count(threads), len(items))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(evaluate, items))
    else:
        values = [evaluate(item) for item in items]
    return Spectrum(frequency=frequencies, counts=np.asarray(values))


def spectral_edge(cfg: ModelConfig) -> float:
    """ν₀ + E_b/h in Hz, the frequency where ε_r = 0 is resonant."""
    return (cfg.pulse.E0 + cfg.bound.E_b) / CONSTANTS.planck_h


def lineshape(delta: ArrayLike, cfg: ModelConfig) -> np.ndarray:
    """h(δ)·F_f(δ), the spectrum shape for very long pulses.

    δ = hν − E₀ − E_b in J; zero below the edge.
    """
    delta = np.asarray(delta, dtype=float)
    positive = np.clip(delta, 0.0, None)
    shape = pair_energy_density(positive, cfg.mix, cfg.trap) * franck_condon(
        positive, cfg.bound, cfg.trap
    )
    return np.where(delta > 0, shape, 0.0)


def perturbative_parameter(cfg: ModelConfig) -> float:
    """Ω·√(max F_f)·τ, the pulse area on the molecular transition.

    A WARNING is logged above 0.5, where first-order perturbation
    theory (and the linear regime) is no longer safe.
    """
    _, peak = franck_condon_peak(cfg.bound, cfg.trap)
    value = cfg.pulse.rabi * math.sqrt(peak) * cfg.pulse.tau
    if value > PERTURBATIVE_LIMIT:
        logger.warning(
            f"Pulse area {value:.3f} on the molecular transition exceeds "
            f"{PERTURBATIVE_LIMIT}; the perturbative model may overestimate "
            "N_mol."
        )
    return value


def synthetic_spectrum(
    grid: ArrayLike,
    cfg: ModelConfig,
    noise: float = 0.0,
    seed: Seed = None,
    with_uncertainty: bool = False,
    threads: Optional[int] = None,
) -> Spectrum:
    """Model spectrum with multiplicative Gaussian noise.

    Parameters:
        grid:
            Frequencies in Hz.
        cfg:
            Model configuration generating the data.
        noise:
            Relative standard deviation of the noise.
        seed:
            Seed or generator for the noise.
        with_uncertainty:
            Attach noise·model as count uncertainties.
    """
    model = compute_spectrum(grid, cfg, threads=threads)
    if isinstance(seed, np.random.Generator):
        rng = seed
    else:
        rng = np.random.default_rng(seed)
    counts = model.counts * (1.0 + noise * rng.standard_normal(len(model)))
    sigma = noise * model.counts if with_uncertainty else None
    return Spectrum(model.frequency, counts, sigma)


def diagnostics(cfg: ModelConfig) -> dict:
    """Model-validity notes of a configuration, for reports."""
    notes = list(cfg.bound.warnings)
    try:
        area = perturbative_parameter(cfg)
    except FeshRFError as exc:  # pragma: no cover
        area = float("nan")
        notes.append(str(exc))
    if area > PERTURBATIVE_LIMIT:
        notes.append(f"pulse area {area:.3f} > {PERTURBATIVE_LIMIT}")
    return {
        "perturbative_parameter": area,
        "chi": cfg.bound.chi,
        "quadrature_rel_tol": cfg.quadrature.rel_tol,
        "warnings": notes,
    }


def scan_peak(cfg: ModelConfig, points: int = 200) -> Tuple[float, float]:
    """Frequency and height of the spectrum maximum.

    The scan spans the edge from −3ħ/τ to +8k_BT and is refined by a
    bounded search around the best grid point.
    """
    edge = spectral_edge(cfg)
    h = CONSTANTS.planck_h
    below = 3.0 * CONSTANTS.hbar / cfg.pulse.tau / h
    above = 8.0 * cfg.mix.kT / h
    grid = np.linspace(edge - below, edge + above, points)
    spectrum = compute_spectrum(grid, cfg)
    best = int(np.argmax(spectrum.counts))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, points - 1)]

    found = optimize.minimize_scalar(
        lambda nu: -molecule_number(nu, cfg),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-3 * (hi - lo)},
    )
    if -found.fun < spectrum.counts[best]:
        return float(grid[best]), float(spectrum.counts[best])
    return float(found.x), float(-found.fun)


def detuning_grid(
    cfg: ModelConfig,
    points: int = 50,
    below: float = 3.0,
    above: float = 10.0,
) -> np.ndarray:
    """Grid around the edge from −below·ħ/τ to +above·k_BT, in Hz."""
    edge = spectral_edge(cfg)
    h = CONSTANTS.planck_h
    return np.linspace(
        edge - below * CONSTANTS.hbar / cfg.pulse.tau / h,
        edge + above * cfg.mix.kT / h,
        points,
    )


__all__: Sequence[str] = (
    "PulseParams",
    "QuadratureSettings",
    "ModelConfig",
    "Spectrum",
    "molecule_number",
    "compute_spectrum",
    "spectral_edge",
    "lineshape",
    "perturbative_parameter",
    "synthetic_spectrum",
    "scan_peak",
    "detuning_grid",
    "diagnostics",
)
