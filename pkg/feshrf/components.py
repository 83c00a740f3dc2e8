#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang (Twist) Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
Components 是模型的基本组件，负责读取一个配置段并构建对应的物理对象。

用户在进行继承的时候，可以在类属性`__args__`中设定该组件必须的参数。
如果该参数在配置中没有被读取到，则会报错。

Every component reads one section of the run configuration (laboratory
units) and builds the SI object the model needs from it.
"""

from __future__ import annotations

import re
from typing import (
    TYPE_CHECKING,
    Any,
    Dict,
    Generic,
    Iterable,
    Optional,
    Set,
    TypeVar,
    Union,
)

from omegaconf import DictConfig, OmegaConf

from feshrf.errors import ConfigurationError, FeshRFError
from feshrf.fitting import FitSettings
from feshrf.quantities import SpeciesPair, to_si
from feshrf.resonance import ResonanceParams
from feshrf.spectrum import PulseParams, QuadratureSettings
from feshrf.tools.func import make_list
from feshrf.tools.regex import MODULE_NAME
from feshrf.trap import MixtureState, TrapConfig

if TYPE_CHECKING:
    from feshrf.main import AssociationModel

T = TypeVar("T")


class _Component(Generic[T]):
    """
    One configuration section of the model.
    It is initialized with a model and an optional name, which is the
    key of its section in the settings.
    """

    __args__: Iterable[str] = []

    def __init__(self, model: AssociationModel, name: Optional[str] = None):
        self._args: Set[str] = set()
        self._model: AssociationModel = model
        if name is None:
            name = self.__class__.__name__.lower()
        self.name = name
        self.add_args(self.__args__)

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__}: {self.name}>"

    @property
    def name(self) -> str:
        """Get the name of the component"""
        return self._name

    @name.setter
    def name(self, value: str) -> None:
        """Set the name of the component"""
        if not isinstance(value, str):
            raise TypeError(f"Name must be a string, not {type(value)}.")
        if not re.fullmatch(MODULE_NAME, value):
            raise ConfigurationError(f"Name '{value}' is not a valid name.")
        self._name: str = value

    @property
    def params(self) -> DictConfig:
        """Read-only section of the model's settings."""
        return self._model.settings.get(self.name, DictConfig({}))

    # alias of params
    p = params

    @property
    def options(self) -> Dict[str, Any]:
        """The section as a plain dict of keyword arguments."""
        options = OmegaConf.to_container(self.params)
        return dict(options)  # type: ignore[arg-type]

    @property
    def args(self) -> DictConfig:
        """Read-only arguments declared by the component."""
        return DictConfig({arg: self.params[arg] for arg in self._args})

    def add_args(self, args: Union[str, Iterable[str]]) -> None:
        """Declare section keys as required arguments.

        Raises:
            ConfigurationError:
                If a key is missing from the section.
        """
        for arg in set(make_list(args)):
            if arg not in self.params:
                raise ConfigurationError(
                    f"Argument '{arg}' not found in section '{self.name}'."
                )
            self._args.add(arg)

    def build(self) -> T:
        """The SI object described by the section."""
        try:
            return self._build()
        except ConfigurationError:
            raise
        except FeshRFError as exc:
            raise ConfigurationError(f"Section '{self.name}': {exc}") from exc

    def _build(self) -> T:
        raise NotImplementedError


class Species(_Component[SpeciesPair]):
    """Masses and labels of the two species."""

    __args__ = ("label_a", "mass_a_amu", "label_b", "mass_b_amu")

    def _build(self) -> SpeciesPair:
        p = self.params
        return SpeciesPair.from_amu(
            p.mass_a_amu, p.mass_b_amu, p.label_a, p.label_b
        )


class Trap(_Component[TrapConfig]):
    """Trap frequencies of species a and b."""

    __args__ = ("freq_a_hz", "freq_b_hz")

    def _build(self) -> TrapConfig:
        freq_a = OmegaConf.to_container(self.params.freq_a_hz)
        freq_b = OmegaConf.to_container(self.params.freq_b_hz)
        return TrapConfig.from_hz(freq_a, freq_b)  # type: ignore[arg-type]


class Mixture(_Component[MixtureState]):
    """Atom numbers and temperature."""

    __args__ = ("n_a", "n_b", "temperature_nk")

    def _build(self) -> MixtureState:
        p = self.params
        return MixtureState(
            n_a=p.n_a,
            n_b=p.n_b,
            temperature=to_si(p.temperature_nk, "nK"),
        )


class Resonance(_Component[ResonanceParams]):
    """Resonance parameters for the model's species."""

    __args__ = (
        "a_bg_nm",
        "b0_gauss",
        "delta_b_gauss",
        "delta_mu_bohr",
        "a_prime_nm",
    )

    def _build(self) -> ResonanceParams:
        return ResonanceParams.from_lab(pair=self._model.pair, **self.options)


class Pulse(_Component[PulseParams]):
    """Radio-frequency pulse."""

    __args__ = ("rabi_khz", "tau_us", "atomic_line_hz")

    def _build(self) -> PulseParams:
        return PulseParams.from_lab(**self.options)


class Quadrature(_Component[QuadratureSettings]):
    """Integration settings of the spectrum engine."""

    def _build(self) -> QuadratureSettings:
        return QuadratureSettings(**self.options)


class Fit(_Component[FitSettings]):
    """Solver options of the fits."""

    __args__ = ("max_iter",)

    def _build(self) -> FitSettings:
        options = self.options
        tol = options.pop("delta_b_tol_gauss")
        return FitSettings(**options, delta_b_tol=to_si(tol, "G"))
