#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
Run configuration.

运行配置：结构化的默认参数，用户的 YAML/JSON 文件在此之上合并。

The schema below is turned into a structured `DictConfig`; user files
are merged on top, so unknown keys or wrong types fail early. Values are
in laboratory units, `feshrf.components` converts them to SI.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, List, Mapping, Optional, Union

from omegaconf import DictConfig, OmegaConf
from omegaconf.errors import OmegaConfBaseException

from feshrf.errors import ConfigurationError
from feshrf.quantities import K40_AMU, RB87_AMU
from feshrf.tools.func import make_list

ENV_CONFIG = "FESHRF_CONFIG"
TRAP_KEYS = ("freq_a_hz", "freq_b_hz")


@dataclass
class SpeciesSection:
    label_a: str = "40K"
    mass_a_amu: float = K40_AMU
    label_b: str = "87Rb"
    mass_b_amu: float = RB87_AMU


@dataclass
class TrapSection:
    # one value (mean) or three values (per axis), in Hz
    freq_a_hz: List[float] = field(default_factory=lambda: [335.0])
    freq_b_hz: List[float] = field(default_factory=lambda: [244.0])


@dataclass
class MixtureSection:
    n_a: float = 5e5
    n_b: float = 2.5e5
    temperature_nk: float = 730.0


@dataclass
class ResonanceSection:
    a_bg_nm: float = 9.88
    b0_gauss: float = 546.618
    delta_b_gauss: float = 3.04
    delta_mu_bohr: float = 2.32
    a_prime_nm: float = 9.10


@dataclass
class PulseSection:
    rabi_khz: float = 45.0
    tau_us: float = 25.0
    atomic_line_hz: float = 0.0


@dataclass
class QuadratureSection:
    rel_tol: float = 1e-9
    abs_tol: float = 0.0
    limit: int = 200
    window: float = 8.0
    rule: str = "adaptive"
    fixed_order: int = 64
    fixed_panels: int = 16


@dataclass
class FitSection:
    max_iter: int = 200
    xtol: float = 1e-8
    gtol: float = 1e-10
    diff_step: float = 1e-6
    max_rounds: int = 20
    delta_b_tol_gauss: float = 1e-3


@dataclass
class RunConfig:
    """Every option of a run.

    Attributes:
        field_gauss:
            Field of the spectrum.
        binding_energy_khz:
            Overrides E_b(B) of the resonance when given.
        scale:
            Scale factor λ of the model.
        seed:
            Seed of the sampling oracle.
        threads:
            Worker threads; `None` runs serially.
    """

    species: SpeciesSection = field(default_factory=SpeciesSection)
    trap: TrapSection = field(default_factory=TrapSection)
    mixture: MixtureSection = field(default_factory=MixtureSection)
    resonance: ResonanceSection = field(default_factory=ResonanceSection)
    pulse: PulseSection = field(default_factory=PulseSection)
    quadrature: QuadratureSection = field(default_factory=QuadratureSection)
    fit: FitSection = field(default_factory=FitSection)
    field_gauss: float = 545.994
    binding_energy_khz: Optional[float] = None
    scale: float = 1.0
    seed: int = 42
    threads: Optional[int] = None


def default_config_path() -> Path:
    """The shipped configuration with the 40K-87Rb parameters."""
    return Path(str(resources.files("feshrf") / "conf" / "k40_rb87.yaml"))


def _read(path: Union[str, Path]) -> DictConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Configuration file {path} not found.")
    try:
        if path.suffix.lower() == ".json":
            with open(path, encoding="utf-8") as file:
                return OmegaConf.create(json.load(file))
        return OmegaConf.load(path)  # type: ignore[return-value]
    except (ValueError, OmegaConfBaseException) as exc:
        raise ConfigurationError(f"Cannot parse {path}: {exc}") from exc


def _trap_lists(overrides: Union[DictConfig, Mapping[str, Any]]) -> DictConfig:
    """A single trap frequency becomes the one-element list of the schema."""
    config = OmegaConf.create(overrides)
    trap = config.get("trap")
    if isinstance(trap, DictConfig):
        for key in TRAP_KEYS:
            value = trap.get(key)
            if value is not None and not OmegaConf.is_list(value):
                trap[key] = make_list(value)
    return config


def build_config(
    overrides: Union[DictConfig, Mapping[str, Any], None] = None
) -> DictConfig:
    """Merge overrides into the structured defaults.

    Raises:
        ConfigurationError:
            On unknown keys or values of the wrong type.
    """
    schema = OmegaConf.structured(RunConfig)
    if overrides is None:
        return schema
    try:
        merged = OmegaConf.merge(schema, _trap_lists(overrides))
        return merged  # type: ignore[return-value]
    except OmegaConfBaseException as exc:
        raise ConfigurationError(f"Invalid configuration: {exc}") from exc


def load_config(path: Union[str, Path, None] = None) -> DictConfig:
    """Load a YAML or JSON configuration file.

    Without a path, the file named by the FESHRF_CONFIG environment
    variable is used, then the shipped defaults.
    """
    if path is None:
        path = os.environ.get(ENV_CONFIG) or default_config_path()
    return build_config(_read(path))
