#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
Independent checks of the pair statistics and of the spectrum engine.

独立检验：用经典相空间抽样检验配对能量分布，用高精度积分检验谱线计算。

Pairs are drawn from the classical Boltzmann distribution of two atoms
in their traps and rewritten in relative and center-of-mass coordinates
with the mean frequencies. In a matched trap both the relative and the
center-of-mass energy then follow a Gamma(3, k_BT) law. The spectrum
is recomputed with tanh-sinh quadrature in extended precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterator, List, Optional, Sequence

import mpmath
import numpy as np
from loguru import logger
from scipy import stats

from feshrf.errors import DataError, DomainError, NumericalError
from feshrf.quantities import (
    CONSTANTS,
    SpeciesPair,
    energy_to_khz,
    thermal_energy,
)
from feshrf.random import CHUNK_SIZE, ChunkedRandom
from feshrf.resonance import ResonanceParams, binding_energy_from_field
from feshrf.spectrum import (
    ModelConfig,
    compute_spectrum,
    detuning_grid,
    scan_peak,
)
from feshrf.trap import (
    TrapConfig,
    effective_trap,
    mismatch_ratio,
    pair_energy_density,
    pair_energy_density_quadrature,
)

MIN_GOF_SAMPLES = 10_000
MEASURED_PEAK = 5e4
REPORTED_BINDING_KHZ = 127.6


@dataclass(frozen=True)
class PairSample:
    """Energies of one sampled atom pair, all in J."""

    eps_rel: float
    eps_cm: float
    eps_total: float
    eps_atoms: float


@dataclass(frozen=True, eq=False)
class PairSamples:
    """Arrays of sampled pair energies.

    Attributes:
        eps_rel:
            Relative energy in the mean trap.
        eps_cm:
            Center-of-mass energy in the mean trap.
        eps_total:
            eps_rel + eps_cm.
        eps_atoms:
            Sum of the two single-atom energies in their own traps;
            differs from eps_total by the coupling term when the traps
            are not matched.
    """

    eps_rel: np.ndarray
    eps_cm: np.ndarray
    eps_total: np.ndarray
    eps_atoms: np.ndarray

    def __len__(self) -> int:
        return int(self.eps_rel.size)

    def __iter__(self) -> Iterator[PairSample]:
        columns = (self.eps_rel, self.eps_cm, self.eps_total, self.eps_atoms)
        for values in zip(*columns):
            yield PairSample(*(float(v) for v in values))


@dataclass
class HistogramReport:
    """Chi-square comparison of a histogram with its expected counts."""

    edges: np.ndarray
    observed: np.ndarray
    expected: np.ndarray
    statistic: float
    p_value: float
    dof: int

    def passed(self, alpha: float = 0.01) -> bool:
        return self.p_value > alpha

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "dof": self.dof,
            "observed": self.observed.tolist(),
            "expected": self.expected.tolist(),
        }


@dataclass
class CheckResult:
    """Outcome of one oracle check."""

    name: str
    passed: bool
    values: Dict[str, Any] = field(default_factory=dict)


@dataclass
class ValidationReport:
    """All checks of an oracle run plus informational diagnostics."""

    checks: List[CheckResult]
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "checks": {
                check.name: {"passed": check.passed, **check.values}
                for check in self.checks
            },
            "diagnostics": self.diagnostics,
        }


def _draw_chunk(
    size: int,
    rng: np.random.Generator,
    trap: TrapConfig,
    pair: SpeciesPair,
    kT: float,
) -> np.ndarray:
    """Energies (rel, cm, atoms) of `size` pairs from one generator."""
    m_a, m_b = pair.mass_a, pair.mass_b
    omega_a = np.asarray(trap.omega_a)
    omega_b = np.asarray(trap.omega_b)
    omega_bar = np.sqrt(omega_a * omega_b)
    x_a = rng.normal(0.0, np.sqrt(kT / m_a) / omega_a, (size, 3))
    p_a = rng.normal(0.0, math.sqrt(m_a * kT), (size, 3))
    x_b = rng.normal(0.0, np.sqrt(kT / m_b) / omega_b, (size, 3))
    p_b = rng.normal(0.0, math.sqrt(m_b * kT), (size, 3))

    def oscillator(p, x, m, omega):
        return np.sum(p**2, axis=1) / (2.0 * m) + 0.5 * m * np.sum(
            (omega * x) ** 2, axis=1
        )

    M, mu = pair.total_mass, pair.reduced_mass
    R = (m_a * x_a + m_b * x_b) / M
    P = p_a + p_b
    r = x_a - x_b
    p = (m_b * p_a - m_a * p_b) / M
    eps_atoms = oscillator(p_a, x_a, m_a, omega_a) + oscillator(
        p_b, x_b, m_b, omega_b
    )
    eps_cm = oscillator(P, R, M, omega_bar)
    eps_rel = oscillator(p, r, mu, omega_bar)
    return np.stack([eps_rel, eps_cm, eps_atoms])


def sample_pairs(
    n: int,
    trap: TrapConfig,
    pair: SpeciesPair,
    temperature: float,
    seed: int,
    threads: Optional[int] = None,
    chunk_size: int = CHUNK_SIZE,
) -> PairSamples:
    """Draw `n` classical atom pairs from the thermal phase-space density.

    The stream is cut into fixed chunks, each with its own generator, so
    the result is identical for any number of threads.

    Raises:
        DomainError:
            If n < 1 or the temperature is not positive.
    """
    if n < 1:
        raise DomainError(f"Need at least one sample, got {n}.")
    kT = thermal_energy(temperature)
    streams = ChunkedRandom(seed, chunk_size)
    chunks = streams.map(
        lambda size, rng: _draw_chunk(size, rng, trap, pair, kT), n, threads
    )
    eps_rel, eps_cm, eps_atoms = np.concatenate(chunks, axis=1)
    return PairSamples(
        eps_rel=eps_rel,
        eps_cm=eps_cm,
        eps_total=eps_rel + eps_cm,
        eps_atoms=eps_atoms,
    )


def _gamma3_gof(values: np.ndarray, kT: float, bins: int) -> HistogramReport:
    """χ² test of energies against Gamma(3, k_BT) on equiprobable bins."""
    n = values.size
    if n < MIN_GOF_SAMPLES:
        raise DataError(
            f"Goodness of fit needs >= {MIN_GOF_SAMPLES} samples, got {n}."
        )
    if bins < 2:
        raise DomainError(f"Need at least two bins, got {bins}.")
    law = stats.gamma(a=3, scale=kT)
    edges = law.ppf(np.linspace(0.0, 1.0, bins + 1))
    index = np.searchsorted(edges[1:-1], values, side="right")
    observed = np.bincount(index, minlength=bins)
    expected = np.full(bins, n / bins)
    statistic, p_value = stats.chisquare(observed, expected)
    return HistogramReport(
        edges=edges,
        observed=observed,
        expected=expected,
        statistic=float(statistic),
        p_value=float(p_value),
        dof=bins - 1,
    )


def relative_energy_gof(
    samples: PairSamples, temperature: float, bins: int = 50
) -> HistogramReport:
    """Relative energies against ε²·exp(−ε/k_BT)/(2(k_BT)³).

    That is Gamma(3, k_BT).

    This is the density of all partial waves. The s-wave restriction of
    h(ε_r) is a quantum selection and cannot be sampled classically.
    """
    return _gamma3_gof(samples.eps_rel, thermal_energy(temperature), bins)


def cm_energy_gof(
    samples: PairSamples, temperature: float, bins: int = 50
) -> HistogramReport:
    """Center-of-mass energies against g_cm·exp(−ε/k_BT), a Gamma(3, k_BT)."""
    return _gamma3_gof(samples.eps_cm, thermal_energy(temperature), bins)


def independence_check(samples: PairSamples) -> CheckResult:
    """Pearson correlation of relative and center-of-mass energy.

    Passes when |r| < 3/√n.
    """
    r, _ = stats.pearsonr(samples.eps_rel, samples.eps_cm)
    bound = 3.0 / math.sqrt(len(samples))
    return CheckResult(
        "independence",
        bool(abs(r) < bound),
        {"pearson_r": float(r), "bound": bound},
    )


def equipartition_check(
    samples: PairSamples, temperature: float
) -> CheckResult:
    """Mean energy per atom and of the relative motion against 3k_BT."""
    kT = thermal_energy(temperature)
    n = len(samples)
    values: Dict[str, Any] = {}
    passed = True
    for name, energies in (
        ("per_atom", samples.eps_atoms / 2.0),
        ("relative", samples.eps_rel),
    ):
        mean = float(np.mean(energies))
        error = float(np.std(energies)) / math.sqrt(n)
        ok = abs(mean - 3.0 * kT) < 3.0 * error
        passed = passed and ok
        values[f"{name}_mean_over_kT"] = mean / kT
        values[f"{name}_stderr_over_kT"] = error / kT
    return CheckResult("equipartition", passed, values)


def energy_identity_check(
    samples: PairSamples, tol: float = 1e-12
) -> CheckResult:
    """ε_rel + ε_cm against the sum of atom energies (matched traps only)."""
    gap = np.abs(samples.eps_total - samples.eps_atoms)
    worst = float(np.max(gap / samples.eps_atoms))
    return CheckResult(
        "energy_identity", worst < tol, {"max_rel_deviation": worst}
    )


def coupling_share(samples: PairSamples) -> float:
    """Mean share of the pair energy carried by the coupling term."""
    coupling = np.mean(samples.eps_atoms - samples.eps_total)
    return float(coupling / np.mean(samples.eps_atoms))


def reference_integral(
    nu: float, cfg: ModelConfig, rel_tol: float = 1e-10
) -> float:
    """Molecule number from tanh-sinh quadrature in extended precision.

    The integrand is rebuilt from the physical formulas and integrated
    over [0, ∞), split at the Gaussian center and its ±window edges.

    Raises:
        DomainError:
            If rel_tol is outside [1e-12, 1e-4].
        NumericalError:
            If the error estimate exceeds rel_tol.
    """
    if not 1e-12 <= rel_tol <= 1e-4:
        raise DomainError(f"rel_tol must lie in [1e-12, 1e-4], got {rel_tol}.")
    digits = int(-math.log10(rel_tol)) + 15
    with mpmath.workdps(digits):
        mpf = mpmath.mpf
        hbar = mpf(CONSTANTS.planck_h) / (2 * mpmath.pi)
        kT = mpf(CONSTANTS.k_B) * mpf(cfg.mix.temperature)
        quantum = hbar * mpf(cfg.trap.omega_tilde)
        bound, pulse = cfg.bound, cfg.pulse
        E_b, E_p = mpf(bound.E_b), mpf(bound.E_b_prime)
        pairs = mpf(cfg.mix.n_a) * mpf(cfg.mix.n_b)
        h_density = pairs * quantum**2 / (2 * kT**3)
        fc = (
            quantum
            * mpf(bound.chi)
            * 2
            / mpmath.pi
            * (1 - mpf(bound.a_prime) / mpf(bound.a)) ** 2
            * mpmath.sqrt(E_b)
            * E_p
        )
        prefactor = (
            mpf(cfg.scale)
            * mpmath.pi
            / 2
            * (mpf(pulse.rabi) * mpf(pulse.tau)) ** 2
        )
        if prefactor == 0:
            return 0.0
        center = mpf(CONSTANTS.planck_h) * mpf(nu) - mpf(pulse.E0) - E_b
        width = hbar / mpf(pulse.tau)

        def integrand(eps):
            gauss = mpmath.exp(-(((center - eps) / width) ** 2))
            pairs = h_density * mpmath.exp(-eps / kT)
            franck = fc * mpmath.sqrt(eps) / ((eps + E_b) ** 2 * (eps + E_p))
            return pairs * gauss * franck

        half = mpf(cfg.quadrature.window) * width
        cuts = [mpf(0), center - half, center, center + half]
        points = sorted({c for c in cuts if c >= 0})
        points.append(mpmath.inf)
        value, error = mpmath.quad(integrand, points, error=True, maxdegree=10)
        total = prefactor * value
        if value != 0 and abs(error) > rel_tol * abs(value):
            raise NumericalError(
                f"Reference quadrature error {float(error / value):.3g} "
                f"above {rel_tol}.",
                estimate=float(total),
                abserr=float(prefactor * error),
            )
        return float(total)


def engine_agreement(
    cfg: ModelConfig,
    grid: Optional[Sequence[float]] = None,
    rel_tol: float = 1e-8,
    threads: Optional[int] = None,
) -> CheckResult:
    """Spectrum engine against `reference_integral` on a grid.

    The engine runs at rel_tol/100, the reference at rel_tol/10, and
    every point must satisfy |Δ| ≤ 2·rel_tol·value.
    """
    if grid is None:
        grid = detuning_grid(cfg)
    quadrature = replace(
        cfg.quadrature, rel_tol=max(rel_tol / 100, 1e-13), limit=500
    )
    strict = replace(cfg, quadrature=quadrature)
    engine = compute_spectrum(grid, strict, threads).counts
    reference = np.array(
        [reference_integral(nu, cfg, rel_tol / 10) for nu in grid]
    )
    delta = np.abs(engine - reference)
    allowed = 2.0 * rel_tol * np.abs(reference)
    ok = (delta <= allowed) | ((engine == 0) & (reference == 0))
    relative = np.divide(
        delta,
        np.abs(reference),
        out=np.zeros_like(delta),
        where=reference != 0,
    )
    return CheckResult(
        "engine_vs_reference",
        bool(np.all(ok)),
        {
            "points": int(len(grid)),
            "max_rel_deviation": float(np.max(relative)),
        },
    )


def closed_form_check(cfg: ModelConfig, rel_tol: float = 1e-8) -> CheckResult:
    """Closed-form h(ε_r) against its center-of-mass integral to 20k_BT."""
    kT = cfg.mix.kT
    energies = np.linspace(0.0, 20.0 * kT, 21)
    closed = pair_energy_density(energies, cfg.mix, cfg.trap)
    numeric = np.array(
        [
            pair_energy_density_quadrature(e, cfg.mix, cfg.trap, rel_tol / 100)
            for e in energies
        ]
    )
    worst = float(np.max(np.abs(numeric - closed) / closed))
    return CheckResult(
        "closed_form_density", worst < rel_tol, {"max_rel_deviation": worst}
    )


def absolute_scale_check(
    cfg: ModelConfig, measured: float = MEASURED_PEAK, factor: float = 30.0
) -> CheckResult:
    """Peak molecule number of the model against a measured peak.

    The model carries no free amplitude at λ = 1, so this only asks for
    agreement within `factor`.
    """
    nu_peak, peak = scan_peak(cfg)
    ratio = peak / measured
    return CheckResult(
        "absolute_scale",
        bool(1.0 / factor <= ratio <= factor),
        {
            "model_peak": peak,
            "peak_frequency_hz": nu_peak,
            "measured_peak": measured,
            "ratio": ratio,
        },
    )


def binding_energy_discrepancy(
    params: ResonanceParams,
    field: float,
    reported_khz: float = REPORTED_BINDING_KHZ,
) -> Dict[str, Any]:
    """Compare E_b(B) of the resonance with a reported binding energy."""
    model_khz = energy_to_khz(binding_energy_from_field(field, params))
    return {
        "model_khz": model_khz,
        "reported_khz": reported_khz,
        "ratio": reported_khz / model_khz,
        "note": (
            "the resonance parameters and the reported binding energy do "
            "not describe the same molecule"
            if abs(reported_khz / model_khz - 1.0) > 0.05
            else "consistent"
        ),
    }


def validate(
    cfg: ModelConfig,
    trap: TrapConfig,
    pair: SpeciesPair,
    n: int = 1_000_000,
    seed: int = 42,
    bins: int = 50,
    rel_tol: float = 1e-8,
    grid_points: int = 50,
    corrupt_temperature: float = 1.0,
    threads: Optional[int] = None,
) -> ValidationReport:
    """Run every oracle check for one model configuration.

    The phase-space checks sample a matched trap with the mean
    frequencies of `trap`, which is the Hamiltonian the closed forms
    describe. The coupling energy of the real trap is reported as a
    diagnostic.

    Parameters:
        cfg:
            Model configuration to validate.
        trap:
            Real per-species trap frequencies.
        pair:
            The two species.
        n:
            Number of sampled pairs.
        seed:
            Root seed of the sampling.
        bins:
            Histogram bins of the goodness-of-fit tests.
        rel_tol:
            Tolerance of the engine-versus-reference comparison.
        grid_points:
            Frequencies compared against the reference.
        corrupt_temperature:
            Factor applied to the temperature of the expected
            distributions; anything but 1 must make the tests fail.
    """
    temperature = cfg.mix.temperature
    expected_t = temperature * corrupt_temperature
    matched = TrapConfig.matched(effective_trap(trap).omega_bar)
    samples = sample_pairs(n, matched, pair, temperature, seed, threads)
    logger.info(f"Sampled {n} pairs with seed {seed}.")

    rel = relative_energy_gof(samples, expected_t, bins)
    cm = cm_energy_gof(samples, expected_t, bins)
    checks = [
        CheckResult("relative_energy_gof", rel.passed(), rel.to_dict()),
        CheckResult("cm_energy_gof", cm.passed(), cm.to_dict()),
        energy_identity_check(samples),
        independence_check(samples),
        equipartition_check(samples, expected_t),
        closed_form_check(cfg),
        engine_agreement(
            cfg, detuning_grid(cfg, grid_points), rel_tol, threads
        ),
        absolute_scale_check(cfg),
    ]
    real = sample_pairs(
        min(n, 100_000), trap, pair, temperature, seed + 1, threads
    )
    diagnostics: Dict[str, Any] = {
        "samples": n,
        "seed": seed,
        "mismatch_ratio": list(mismatch_ratio(trap)),
        "real_trap_coupling_share": coupling_share(real),
    }
    if cfg.resonance is not None and cfg.field is not None:
        diagnostics["binding_energy"] = binding_energy_discrepancy(
            cfg.resonance, cfg.field
        )
    for check in checks:
        level = "INFO" if check.passed else "WARNING"
        logger.log(level, f"Oracle check {check.name}: passed={check.passed}.")
    return ValidationReport(checks=checks, diagnostics=diagnostics)
