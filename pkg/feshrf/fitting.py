#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
Least-squares fits of spectra and of the binding-energy curve.

拟合：从谱线得到结合能，从结合能曲线得到共振位置和宽度。

All fits use a trust-region reflective least-squares solver with a
bounded box, so "damping" is the adaptive trust radius of that solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import optimize

from feshrf.errors import (
    BoundaryError,
    DataError,
    DegenerateDataError,
    FeshRFError,
    FitError,
    InvalidBranchError,
    IterationError,
)
from feshrf.quantities import (
    CONSTANTS,
    energy_to_khz,
    from_si,
    khz_to_energy,
    to_si,
)
from feshrf.resonance import (
    ResonanceParams,
    binding_energy_from_field,
    scattering_length,
)
from feshrf.spectrum import (
    ModelConfig,
    Spectrum,
    compute_spectrum,
    molecule_number,
    spectral_edge,
)

# Box of the spectrum fit: E_b/h in kHz and the profiled scale λ.
E_B_BOUNDS_KHZ: Tuple[float, float] = (1e-6, 1e4)
SCALE_BOUNDS: Tuple[float, float] = (0.0, 1e3)
# Smallest gap kept between fitted B₀ and the outermost field, in G.
POLE_GAP_GAUSS = 1e-6


@dataclass(frozen=True)
class FitSettings:
    """Solver options shared by every fit.

    Attributes:
        max_iter:
            Maximal number of residual evaluations.
        xtol:
            Relative step tolerance.
        gtol:
            Gradient tolerance.
        diff_step:
            Relative step of the finite-difference Jacobian.
        max_rounds:
            Rounds of the self-consistent χ iteration.
        delta_b_tol:
            Convergence threshold of that iteration, on ΔB in T.
    """

    max_iter: int = 200
    xtol: float = 1e-8
    gtol: float = 1e-10
    diff_step: float = 1e-6
    max_rounds: int = 20
    delta_b_tol: float = 1e-7

    def solver_options(self) -> dict:
        return {
            "method": "trf",
            "jac": "3-point",
            "diff_step": self.diff_step,
            "xtol": self.xtol,
            "gtol": self.gtol,
            "ftol": None,
            "max_nfev": self.max_iter,
        }


@dataclass
class SpectrumFitResult:
    """Fitted binding energy and scale of one spectrum.

    Attributes:
        E_b:
            Binding energy in J.
        E_b_err:
            1σ uncertainty of E_b in J.
        scale:
            Scale factor λ.
        scale_err:
            1σ uncertainty of λ.
        covariance:
            2×2 covariance in (E_b/h in kHz, λ).
        residual_norm:
            Weighted residual sum of squares.
        n_iterations:
            Residual evaluations used by the solver.
        converged:
            Whether a convergence criterion was met.
        residuals:
            Weighted residuals at the optimum.
        jacobian:
            Weighted Jacobian at the optimum, columns (E_b/h in kHz, λ).
        message:
            Solver message.
    """

    E_b: float
    E_b_err: float
    scale: float
    scale_err: float
    covariance: np.ndarray
    residual_norm: float
    n_iterations: int
    converged: bool
    residuals: np.ndarray = field(repr=False)
    jacobian: np.ndarray = field(repr=False)
    message: str = ""

    @property
    def E_b_khz(self) -> float:
        return energy_to_khz(self.E_b)

    @property
    def E_b_err_khz(self) -> float:
        return energy_to_khz(self.E_b_err)

    def to_dict(self) -> dict:
        """JSON friendly summary in laboratory units."""
        return {
            "binding_energy_khz": self.E_b_khz,
            "binding_energy_err_khz": self.E_b_err_khz,
            "lambda": self.scale,
            "lambda_err": self.scale_err,
            "covariance": np.asarray(self.covariance).tolist(),
            "residual_norm": self.residual_norm,
            "residuals": np.asarray(self.residuals).tolist(),
            "n_iterations": self.n_iterations,
            "converged": self.converged,
            "message": self.message,
        }


@dataclass
class ResonanceFitResult:
    """Fitted resonance position and width.

    Attributes:
        params:
            Resonance parameters with the fitted B₀ and ΔB.
        B0_err:
            1σ uncertainty of B₀ in T.
        DeltaB_err:
            1σ uncertainty of ΔB in T.
        covariance:
            2×2 covariance of (B₀, ΔB) in G².
        residual_norm:
            Weighted residual sum of squares.
        n_iterations:
            Residual evaluations used by the solver.
        converged:
            Whether a convergence criterion was met.
        residuals:
            Weighted residuals at the optimum.
        jacobian:
            Weighted Jacobian at the optimum, columns (B₀, ΔB) in G.
    """

    params: ResonanceParams
    B0_err: float
    DeltaB_err: float
    covariance: np.ndarray
    residual_norm: float
    n_iterations: int
    converged: bool
    residuals: np.ndarray = field(repr=False)
    jacobian: np.ndarray = field(repr=False)
    message: str = ""

    @property
    def B0(self) -> float:
        return self.params.B0

    @property
    def DeltaB(self) -> float:
        return self.params.DeltaB

    def to_dict(self) -> dict:
        return {
            "b0_gauss": from_si(self.B0, "G"),
            "b0_err_gauss": from_si(self.B0_err, "G"),
            "delta_b_gauss": from_si(self.DeltaB, "G"),
            "delta_b_err_gauss": from_si(self.DeltaB_err, "G"),
            "covariance": np.asarray(self.covariance).tolist(),
            "residual_norm": self.residual_norm,
            "residuals": np.asarray(self.residuals).tolist(),
            "n_iterations": self.n_iterations,
            "converged": self.converged,
            "message": self.message,
        }


@dataclass
class TailFitResult:
    """Temperature from the exponential high-frequency tail."""

    temperature: float
    temperature_err: float
    n_points: int
    window: Tuple[float, float]


@dataclass
class ChiIterationResult:
    """Outcome of the self-consistent χ iteration.

    Attributes:
        params:
            Final resonance parameters.
        trace:
            ΔB in T after every round.
        spectrum_fits:
            Spectrum fits of the last round, in the order of the data.
        resonance_fit:
            Resonance fit of the last round.
        rounds:
            Rounds performed.
        converged:
            Whether ΔB settled below the threshold.
    """

    params: ResonanceParams
    trace: List[float]
    spectrum_fits: List[SpectrumFitResult]
    resonance_fit: ResonanceFitResult
    rounds: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "resonance": self.resonance_fit.to_dict(),
            "delta_b_trace_gauss": [from_si(v, "G") for v in self.trace],
            "spectra": [fit.to_dict() for fit in self.spectrum_fits],
            "rounds": self.rounds,
            "converged": self.converged,
        }


def _covariance(jacobian: np.ndarray, residuals: np.ndarray) -> np.ndarray:
    """(JᵀJ)⁻¹ scaled by the reduced chi-square.

    Raises:
        FitError:
            If JᵀJ is singular.
    """
    jtj = jacobian.T @ jacobian
    if not np.all(np.isfinite(jtj)) or np.linalg.cond(jtj) > 1e14:
        raise FitError("Parameters are not identifiable (singular JᵀJ).")
    dof = residuals.size - jacobian.shape[1]
    s_sq = float(residuals @ residuals) / dof if dof > 0 else 1.0
    return np.linalg.inv(jtj) * s_sq


def _weights(data: Spectrum) -> np.ndarray:
    """1/σ per point; σ = √max(count, 1) when the data carry none."""
    if data.uncertainty is None:
        sigma = np.sqrt(np.maximum(data.counts, 1.0))
    else:
        sigma = data.uncertainty
        if np.any(sigma <= 0) or not np.all(np.isfinite(sigma)):
            raise DataError("Count uncertainties must be positive and finite.")
    return 1.0 / sigma


def initial_guess(data: Spectrum, cfg: ModelConfig) -> Tuple[float, float]:
    """Starting values (E_b in J, λ) read off the spectrum peak.

    E_b,init = h(ν_peak − ν₀) − k_BT/2, or half the peak detuning when
    that is not positive. λ_init matches the model peak to the data.

    Raises:
        DegenerateDataError:
            If the data have no interior maximum or are flat.
    """
    if len(data) < 3:
        raise DegenerateDataError(f"Need at least 3 points, got {len(data)}.")
    counts = data.counts
    peak = int(np.argmax(counts))
    if counts[peak] <= np.min(counts) or peak in (0, len(data) - 1):
        raise DegenerateDataError("The spectrum has no interior maximum.")
    nu_peak = float(data.frequency[peak])
    detuning = CONSTANTS.planck_h * nu_peak - cfg.pulse.E0
    E_init = detuning - 0.5 * cfg.mix.kT
    if E_init <= 0:
        E_init = 0.5 * detuning
    if E_init <= 0:
        raise DegenerateDataError(
            f"The peak at {nu_peak} Hz lies below the atomic line."
        )
    unit = cfg.with_binding_energy(E_init).with_scale(1.0)
    model = molecule_number(nu_peak, unit)
    scale = float(counts[peak]) / model if model > 0 else 1.0
    logger.debug(
        f"Initial guess: E_b = {energy_to_khz(E_init):.3f} kHz, "
        f"λ = {scale:.4g}."
    )
    return E_init, scale


class _SpectrumProblem:
    """Residuals of a spectrum with λ profiled out analytically."""

    def __init__(
        self, data: Spectrum, cfg: ModelConfig, threads: Optional[int]
    ) -> None:
        self.data = data
        self.cfg = cfg.with_scale(1.0)
        self.threads = threads
        self.weights = _weights(data)

    def model(self, E_b_khz: float) -> np.ndarray:
        cfg = self.cfg.with_binding_energy(khz_to_energy(E_b_khz))
        return compute_spectrum(self.data.frequency, cfg, self.threads).counts

    def scale(self, model: np.ndarray) -> float:
        """λ* = Σw²ym/Σw²m² clipped to its box."""
        w_sq = self.weights**2
        denominator = float(np.sum(w_sq * model**2))
        if denominator == 0:
            return 0.0
        best = float(np.sum(w_sq * self.data.counts * model)) / denominator
        return min(max(best, SCALE_BOUNDS[0]), SCALE_BOUNDS[1])

    def residuals(self, x: np.ndarray) -> np.ndarray:
        model = self.model(float(x[0]))
        return (self.data.counts - self.scale(model) * model) * self.weights

    def jacobian(
        self, E_b_khz: float, step: float
    ) -> Tuple[np.ndarray, np.ndarray, float]:
        """Weighted residuals, Jacobian (E_b, λ) and λ at the optimum."""
        model = self.model(E_b_khz)
        scale = self.scale(model)
        delta = step * E_b_khz
        slope = (self.model(E_b_khz + delta) - self.model(E_b_khz - delta)) / (
            2.0 * delta
        )
        jac = -np.column_stack([scale * slope, model]) * self.weights[:, None]
        residuals = (self.data.counts - scale * model) * self.weights
        return residuals, jac, scale


def fit_spectrum(
    data: Spectrum,
    cfg: ModelConfig,
    init: Optional[Tuple[float, float]] = None,
    settings: FitSettings = FitSettings(),
    threads: Optional[int] = None,
) -> SpectrumFitResult:
    """Fit E_b and λ of one spectrum.

    The solver only moves E_b (in kHz); for each trial E_b the best λ
    is a linear least-squares solution. Uncertainties come from the full
    two-parameter Jacobian at the optimum, scaled by the reduced
    chi-square.

    Parameters:
        data:
            The measured spectrum.
        cfg:
            Model configuration; its resonance parameters rebuild the
            bound state for every trial E_b.
        init:
            Optional starting (E_b in J, λ); `initial_guess` otherwise.
        settings:
            Solver options.
        threads:
            Worker threads for the model spectra.

    Raises:
        DegenerateDataError:
            If no starting point can be read from the data.
        BoundaryError:
            If E_b or λ ends on a bound, or the data carry no signal.
        FitError:
            If the solver stops without converging (`result` holds the
            best state) or the parameters are not identifiable.
    """
    if len(data) < 3:
        raise DataError(
            f"A spectrum fit needs at least 3 points, got {len(data)}."
        )
    if not np.any(data.counts > 0):
        raise BoundaryError(
            "The spectrum has no positive counts: lambda is 0 and E_b is "
            "not identifiable."
        )
    if init is None:
        init = initial_guess(data, cfg)
    problem = _SpectrumProblem(data, cfg, threads)
    lo, hi = E_B_BOUNDS_KHZ
    x0 = min(max(energy_to_khz(init[0]), lo * 10), hi / 10)
    solution = optimize.least_squares(
        problem.residuals,
        x0=[x0],
        bounds=([lo], [hi]),
        **settings.solver_options(),
    )
    E_b_khz = float(solution.x[0])
    residuals, jac, scale = problem.jacobian(E_b_khz, settings.diff_step)
    converged = solution.status > 0

    def build(cov: np.ndarray) -> SpectrumFitResult:
        return SpectrumFitResult(
            E_b=khz_to_energy(E_b_khz),
            E_b_err=khz_to_energy(math.sqrt(max(cov[0, 0], 0.0))),
            scale=scale,
            scale_err=math.sqrt(max(cov[1, 1], 0.0)),
            covariance=cov,
            residual_norm=float(residuals @ residuals),
            n_iterations=int(solution.nfev),
            converged=converged,
            residuals=residuals,
            jacobian=jac,
            message=str(solution.message),
        )

    try:
        cov = _covariance(jac, residuals)
    except FitError as exc:
        nan = np.full((2, 2), np.nan)
        raise FitError(str(exc), result=build(nan)) from exc
    result = build(cov)
    if not converged:
        raise FitError(
            f"Spectrum fit did not converge: {solution.message}", result
        )
    if solution.active_mask[0] != 0:
        raise BoundaryError(
            f"Binding energy ended on its bound ({E_b_khz:.6g} kHz).", result
        )
    if scale <= SCALE_BOUNDS[0] or scale >= SCALE_BOUNDS[1]:
        raise BoundaryError(
            f"Scale factor ended on its bound ({scale}).", result
        )
    if result.scale_err > 0 and scale / result.scale_err < 1.0:
        raise FitError(
            "The scale factor is not identifiable from the data.", result
        )
    logger.info(
        f"Spectrum fit: E_b = {result.E_b_khz:.4f} "
        f"± {result.E_b_err_khz:.4f} kHz, "
        f"λ = {scale:.4g} ± {result.scale_err:.2g} "
        f"({solution.nfev} evaluations)."
    )
    return result


Point = Tuple[float, float, float]


def _branch(points: Sequence[Point], params: ResonanceParams) -> int:
    """+1 when every field lies above B₀ of `params`, −1 when below."""
    sides = {math.copysign(1.0, B - params.B0) for B, _, _ in points}
    if len(sides) != 1 or any(B == params.B0 for B, _, _ in points):
        raise InvalidBranchError(
            "Binding-energy points lie on both sides of the resonance pole."
        )
    return int(sides.pop())


def fit_resonance(
    points: Sequence[Point],
    params: ResonanceParams,
    settings: FitSettings = FitSettings(),
    min_points: int = 3,
) -> ResonanceFitResult:
    """Fit B₀ and ΔB to binding energies measured at several fields.

    Parameters:
        points:
            (B in T, E_b in J, σ_E in J) triples.
        params:
            Template resonance; a_bg, Δμ and a′ stay fixed, B₀ and ΔB
            start from its values. The side of the pole is taken from it.
        settings:
            Solver options.
        min_points:
            Smallest accepted number of points.

    Raises:
        DataError:
            If there are too few points or σ is not positive.
        InvalidBranchError:
            If the points straddle the pole or a fitted field has no
            bound state.
        BoundaryError:
            If B₀ or ΔB ends on one of its bounds.
        FitError:
            If the solver does not converge or the parameters are not
            identifiable.
    """
    if len(points) < min_points:
        raise DataError(
            f"Need at least {min_points} points, got {len(points)}."
        )
    fields = np.array([p[0] for p in points], dtype=float)
    energies = np.array([p[1] for p in points], dtype=float)
    sigmas = np.array([p[2] for p in points], dtype=float)
    if np.any(sigmas <= 0) or not np.all(np.isfinite(sigmas)):
        raise DataError("Binding-energy uncertainties must be positive.")
    side = _branch(points, params)
    fields_g = fields / to_si(1.0, "G")
    # B₀ = reference − side·gap, gap > 0 keeps every point on one side.
    reference = fields_g.max() if side < 0 else fields_g.min()
    gap0 = abs(from_si(params.B0, "G") - reference)
    width_sign = math.copysign(1.0, params.DeltaB)
    y = energy_to_khz(energies)
    w = 1.0 / energy_to_khz(sigmas)

    def unpack(x: np.ndarray) -> ResonanceParams:
        return replace(
            params,
            B0=to_si(reference - side * x[0], "G"),
            DeltaB=to_si(width_sign * x[1], "G"),
        )

    def residuals(x: np.ndarray) -> np.ndarray:
        try:
            trial = unpack(x)
            model = energy_to_khz(
                np.array([binding_energy_from_field(B, trial) for B in fields])
            )
        except FeshRFError:
            return np.full(fields.size, 1e6)
        return (model - y) * w

    x0 = np.array(
        [max(gap0, 10 * POLE_GAP_GAUSS), abs(from_si(params.DeltaB, "G"))]
    )
    solution = optimize.least_squares(
        residuals,
        x0=x0,
        bounds=([POLE_GAP_GAUSS, 0.0], [np.inf, np.inf]),
        **settings.solver_options(),
    )
    if solution.x[1] <= 0:
        raise BoundaryError(
            f"DeltaB collapsed to its bound at 0 after {solution.nfev} "
            "evaluations."
        )
    fitted = unpack(solution.x)
    if any(scattering_length(B, fitted) <= 0 for B in fields):
        raise InvalidBranchError(
            "The fitted resonance has no bound state at the data."
        )
    # d/dB₀ = −side·d/dgap, d/dΔB = sign·d/dwidth
    jac = solution.jac * np.array([-side, width_sign])
    res = solution.fun

    def build(cov: np.ndarray) -> ResonanceFitResult:
        return ResonanceFitResult(
            params=fitted,
            B0_err=to_si(math.sqrt(max(cov[0, 0], 0.0)), "G"),
            DeltaB_err=to_si(math.sqrt(max(cov[1, 1], 0.0)), "G"),
            covariance=cov,
            residual_norm=float(res @ res),
            n_iterations=int(solution.nfev),
            converged=solution.status > 0,
            residuals=res,
            jacobian=jac,
            message=str(solution.message),
        )

    try:
        cov = _covariance(jac, res)
    except FitError as exc:
        nan = np.full((2, 2), np.nan)
        raise FitError(str(exc), result=build(nan)) from exc
    result = build(cov)
    if not result.converged:
        raise FitError(
            f"Resonance fit did not converge: {solution.message}", result
        )
    if solution.active_mask[0] != 0 or solution.active_mask[1] != 0:
        raise BoundaryError("B0 or DeltaB ended on its bound.", result)
    logger.info(
        f"Resonance fit: B0 = {from_si(fitted.B0, 'G'):.4f} G, "
        f"ΔB = {from_si(fitted.DeltaB, 'G'):.4f} G."
    )
    return result


def fit_tail_temperature(
    data: Spectrum,
    cfg: ModelConfig,
    window: Tuple[float, float] = (2.0, 5.0),
) -> TailFitResult:
    """Temperature from a log-linear fit of the high-frequency tail.

    Points between window[0]·k_BT/h and window[1]·k_BT/h above the
    spectral edge are used, k_BT taken from `cfg`.

    Raises:
        DataError:
            If fewer than 4 positive points fall into the window.
    """
    h = CONSTANTS.planck_h
    kT = cfg.mix.kT
    detuning = data.frequency - spectral_edge(cfg)
    mask = (
        (detuning >= window[0] * kT / h)
        & (detuning <= window[1] * kT / h)
        & (data.counts > 0)
    )
    if np.count_nonzero(mask) < 4:
        raise DataError("Fewer than 4 usable points in the tail window.")
    coef, cov = np.polyfit(
        detuning[mask] * h, np.log(data.counts[mask]), deg=1, cov=True
    )
    slope = coef[0]
    if slope >= 0:
        raise DataError("The tail does not decay.")
    temperature = -1.0 / (CONSTANTS.k_B * slope)
    error = temperature * math.sqrt(max(cov[0, 0], 0.0)) / abs(slope)
    return TailFitResult(
        temperature=temperature,
        temperature_err=error,
        n_points=int(np.count_nonzero(mask)),
        window=window,
    )


def self_consistent_chi_iteration(
    datasets: Sequence[Tuple[float, Spectrum]],
    cfg: ModelConfig,
    params: ResonanceParams,
    settings: FitSettings = FitSettings(),
    threads: Optional[int] = None,
) -> ChiIterationResult:
    """Alternate spectrum fits and the resonance fit until ΔB settles.

    Each round fits every spectrum with χ from the current resonance,
    then refits B₀ and ΔB to the binding energies found.

    Parameters:
        datasets:
            (field in T, spectrum) pairs at distinct fields.
        cfg:
            Model configuration shared by all spectra.
        params:
            Starting resonance parameters.

    Raises:
        DataError:
            With fewer than two spectra or repeated fields.
        IterationError:
            If ΔB still moves after `settings.max_rounds` rounds;
            `trace` holds ΔB of every round.
    """
    fields = [B for B, _ in datasets]
    if len(datasets) < 2 or len(set(fields)) != len(fields):
        raise DataError("Need at least two spectra at distinct fields.")
    trace: List[float] = []
    inits: List[Optional[Tuple[float, float]]] = [None] * len(datasets)
    current = params
    resonance_fit: Optional[ResonanceFitResult] = None
    fits: List[SpectrumFitResult] = []
    for round_ in range(1, settings.max_rounds + 1):
        fits = []
        for i, (B, spectrum) in enumerate(datasets):
            local = replace(cfg, resonance=current, field=B)
            fit = fit_spectrum(spectrum, local, inits[i], settings, threads)
            inits[i] = (fit.E_b, fit.scale)
            fits.append(fit)
        points = [
            (B, fit.E_b, fit.E_b_err if fit.E_b_err > 0 else 1e-6 * fit.E_b)
            for (B, _), fit in zip(datasets, fits)
        ]
        resonance_fit = fit_resonance(points, current, settings, min_points=2)
        previous = current.DeltaB
        current = resonance_fit.params
        trace.append(current.DeltaB)
        logger.info(
            f"Round {round_}: ΔB = {from_si(current.DeltaB, 'G'):.5f} G."
        )
        if abs(current.DeltaB - previous) < settings.delta_b_tol:
            return ChiIterationResult(
                params=current,
                trace=trace,
                spectrum_fits=fits,
                resonance_fit=resonance_fit,
                rounds=round_,
                converged=True,
            )
    result = ChiIterationResult(
        params=current,
        trace=trace,
        spectrum_fits=fits,
        resonance_fit=resonance_fit,  # type: ignore[arg-type]
        rounds=settings.max_rounds,
        converged=False,
    )
    raise IterationError(
        f"ΔB did not settle within {settings.max_rounds} rounds.",
        result=result,
        trace=trace,
    )


__all__ = [
    "FitSettings",
    "SpectrumFitResult",
    "ResonanceFitResult",
    "TailFitResult",
    "ChiIterationResult",
    "initial_guess",
    "fit_spectrum",
    "fit_resonance",
    "fit_tail_temperature",
    "self_consistent_chi_iteration",
]
