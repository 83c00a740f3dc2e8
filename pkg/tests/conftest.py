#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang (Twist) Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
PyTest fixtures.
"""

import numpy as np
import pytest
from hydra import compose, initialize

from feshrf import AssociationModel
from feshrf.quantities import CONSTANTS, khz_to_energy
from feshrf.spectrum import ModelConfig, spectral_edge


@pytest.fixture(name="lab_config")
def fixture_lab_config():
    """40K-87Rb 参数，对应默认配置"""
    with initialize(version_base=None, config_path="config"):
        cfg = compose(config_name="k40_rb87")
    return cfg


@pytest.fixture(name="matched_config")
def fixture_matched_config():
    """两种原子处于同一个势阱"""
    with initialize(version_base=None, config_path="config"):
        cfg = compose(config_name="matched_trap")
    return cfg


@pytest.fixture(name="reported_config")
def fixture_reported_config():
    """使用 127.6 kHz 结合能的配置"""
    with initialize(version_base=None, config_path="config"):
        cfg = compose(config_name="reported_binding")
    return cfg


@pytest.fixture(name="model")
def mock_model(lab_config) -> AssociationModel:
    """创建一个默认参数的模型"""
    return AssociationModel(parameters=lab_config)


@pytest.fixture(name="cfg")
def mock_model_config(model: AssociationModel) -> ModelConfig:
    """默认模型在 545.994 G 处的谱线配置"""
    return model.model_config()


@pytest.fixture(name="cfg_60khz")
def mock_cfg_60khz(cfg: ModelConfig) -> ModelConfig:
    """结合能为 60 kHz 的谱线配置，用于拟合测试"""
    return cfg.with_binding_energy(khz_to_energy(60.0))


def _edge_grid(
    cfg: ModelConfig, below_khz=50.0, above_khz=150.0, step_khz=2.5
):
    """A frequency grid around the spectral edge, in Hz."""
    offsets = np.arange(-below_khz, above_khz + step_khz / 2, step_khz)
    return spectral_edge(cfg) + 1e3 * offsets


@pytest.fixture(name="edge_grid")
def fixture_edge_grid():
    """在谱线边缘附近生成频率网格的函数"""
    return _edge_grid


@pytest.fixture(name="grid")
def mock_grid(cfg_60khz: ModelConfig) -> np.ndarray:
    """60 kHz 分子谱线附近的频率网格"""
    return _edge_grid(cfg_60khz)


@pytest.fixture(name="h")
def planck() -> float:
    """Planck 常数"""
    return CONSTANTS.planck_h
