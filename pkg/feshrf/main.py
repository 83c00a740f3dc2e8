#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
The association model: one configured experiment.
"""

from __future__ import annotations

from functools import cached_property
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike
from omegaconf import DictConfig, OmegaConf

from feshrf import __version__
from feshrf.components import (
    Fit,
    Mixture,
    Pulse,
    Quadrature,
    Resonance,
    Species,
    Trap,
)
from feshrf.config import build_config
from feshrf.errors import NoBoundStateError, PoleError
from feshrf.fitting import (
    ChiIterationResult,
    FitSettings,
    ResonanceFitResult,
    SpectrumFitResult,
    TailFitResult,
    fit_resonance,
    fit_spectrum,
    fit_tail_temperature,
    self_consistent_chi_iteration,
)
from feshrf.oracle import ValidationReport, validate
from feshrf.quantities import SpeciesPair, khz_to_energy, to_si
from feshrf.resonance import (
    BoundStateInfo,
    ResonanceParams,
    bound_state,
    bound_state_from_energy,
)
from feshrf.spectrum import (
    ModelConfig,
    PulseParams,
    QuadratureSettings,
    Spectrum,
    compute_spectrum,
    diagnostics,
)
from feshrf.trap import EffectiveTrap, MixtureState, TrapConfig, effective_trap

Parameters = Union[DictConfig, Mapping[str, Any], None]


class AssociationModel:
    """
    Radio-frequency association of one two-species mixture.

    Attributes:
        name:
            Name of the model, the class name by default.
        settings:
            Structured parameters (laboratory units). Components read their
            own section, e.g. `model.settings.pulse.tau_us`.
        version:
            Version of feshrf that built the model.
    """

    def __init__(self, parameters: Parameters = None) -> None:
        self._settings: DictConfig = build_config(parameters)
        self._version: str = __version__
        self._species = Species(self)
        self._trap = Trap(self)
        self._mixture = Mixture(self)
        self._resonance = Resonance(self)
        self._pulse = Pulse(self)
        self._quadrature = Quadrature(self)
        self._fit = Fit(self)
        logger.debug(f"Built {self!r}.")

    def __repr__(self) -> str:
        return f"<{self.name}-{self._version}>"

    @property
    def name(self) -> str:
        """Name of the model, the class name by default."""
        return self.__class__.__name__

    @property
    def version(self) -> str:
        return self._version

    @property
    def settings(self) -> DictConfig:
        """Structured parameters of the model."""
        return self._settings

    @cached_property
    def pair(self) -> SpeciesPair:
        return self._species.build()

    @cached_property
    def trap_config(self) -> TrapConfig:
        return self._trap.build()

    @property
    def trap(self) -> EffectiveTrap:
        return effective_trap(self.trap_config)

    @cached_property
    def mixture(self) -> MixtureState:
        return self._mixture.build()

    @cached_property
    def resonance(self) -> ResonanceParams:
        return self._resonance.build()

    @cached_property
    def pulse(self) -> PulseParams:
        return self._pulse.build()

    @cached_property
    def quadrature(self) -> QuadratureSettings:
        return self._quadrature.build()

    @cached_property
    def fit_settings(self) -> FitSettings:
        return self._fit.build()

    @property
    def field(self) -> float:
        """Field of the spectrum in T."""
        return to_si(self.settings.field_gauss, "G")

    @property
    def threads(self) -> Optional[int]:
        return self.settings.threads

    @cached_property
    def bound(self) -> BoundStateInfo:
        """The molecule; E_b from the configuration overrides E_b(B)."""
        override = self.settings.binding_energy_khz
        if override is not None:
            return bound_state_from_energy(
                khz_to_energy(override), self.resonance
            )
        return bound_state(self.field, self.resonance)

    def model_config(self, field: Optional[float] = None) -> ModelConfig:
        """Model configuration at the configured (or another) field in T."""
        if field is None:
            bound = self.bound
        else:
            bound = bound_state(field, self.resonance)
        return ModelConfig(
            mix=self.mixture,
            trap=self.trap,
            pulse=self.pulse,
            bound=bound,
            scale=self.settings.scale,
            resonance=self.resonance,
            field=self.field if field is None else field,
            quadrature=self.quadrature,
        )

    def spectrum(self, grid: ArrayLike) -> Spectrum:
        """Model spectrum on a frequency grid in Hz."""
        return compute_spectrum(grid, self.model_config(), self.threads)

    def fit_spectrum(
        self, data: Spectrum, init: Optional[Tuple[float, float]] = None
    ) -> SpectrumFitResult:
        return fit_spectrum(
            data, self.model_config(), init, self.fit_settings, self.threads
        )

    def fit_resonance(
        self, points: Sequence[Tuple[float, float, float]]
    ) -> ResonanceFitResult:
        return fit_resonance(points, self.resonance, self.fit_settings)

    def tail_temperature(
        self, data: Spectrum, window: Tuple[float, float] = (2.0, 5.0)
    ) -> TailFitResult:
        """Temperature from the tail, `window` in k_BT above the edge."""
        return fit_tail_temperature(data, self.model_config(), window)

    def iterate(
        self, datasets: Sequence[Tuple[float, Spectrum]]
    ) -> ChiIterationResult:
        """Self-consistent χ iteration over spectra at several fields."""
        return self_consistent_chi_iteration(
            datasets,
            self.model_config(),
            self.resonance,
            self.fit_settings,
            self.threads,
        )

    def binding_curve(self, fields: ArrayLike) -> List[BoundStateInfo]:
        """Bound states along a field range in T.

        Raises:
            PoleError:
                If the range reaches or crosses B₀.
            NoBoundStateError:
                If a field has no molecule.
        """
        fields = np.asarray(fields, dtype=float)
        offsets = fields - self.resonance.B0
        crosses = np.any(offsets < 0) and np.any(offsets > 0)
        if np.any(offsets == 0) or crosses:
            raise PoleError(
                f"The field range crosses the resonance pole at "
                f"{self.settings.resonance.b0_gauss} G."
            )
        states = []
        for B in fields:
            try:
                states.append(bound_state(float(B), self.resonance))
            except NoBoundStateError as exc:
                raise NoBoundStateError(
                    f"No bound state at {B / 1e-4:.6g} G (a <= 0)."
                ) from exc
        return states

    def validate(
        self,
        n: int,
        seed: Optional[int] = None,
        corrupt_temperature: float = 1.0,
        **kwargs: Any,
    ) -> ValidationReport:
        """Oracle checks of the configured model."""
        return validate(
            self.model_config(),
            self.trap_config,
            self.pair,
            n=n,
            seed=self.settings.seed if seed is None else seed,
            corrupt_temperature=corrupt_temperature,
            threads=self.threads,
            **kwargs,
        )

    def diagnostics(self) -> Dict[str, Any]:
        """Model-validity notes of the configured spectrum."""
        return diagnostics(self.model_config())

    def echo(self) -> Dict[str, Any]:
        """The settings as plain containers, for reports."""
        echo = OmegaConf.to_container(self.settings, resolve=True)
        return echo  # type: ignore[return-value]
