#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
feshrf - Radio-frequency association of heteronuclear Feshbach molecules
in a thermal, harmonically trapped two-species mixture.

Model spectra, fits of binding energies and resonance parameters, and
independent checks of the pair statistics.
"""

__all__ = [
    "__version__",
    "AssociationModel",
    "ModelConfig",
    "PulseParams",
    "Spectrum",
    "ResonanceParams",
    "SpeciesPair",
    "TrapConfig",
    "MixtureState",
    "compute_spectrum",
    "molecule_number",
    "fit_spectrum",
    "fit_resonance",
    "load_config",
]
__version__ = "v0.1.0"

from .config import load_config
from .fitting import fit_resonance, fit_spectrum
from .main import AssociationModel
from .quantities import SpeciesPair
from .resonance import ResonanceParams
from .spectrum import (
    ModelConfig,
    PulseParams,
    Spectrum,
    compute_spectrum,
    molecule_number,
)
from .trap import MixtureState, TrapConfig
