#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang (Twist) Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

import numpy as np
import pytest
from omegaconf import DictConfig

from feshrf import __version__
from feshrf.errors import NoBoundStateError, PoleError
from feshrf.main import AssociationModel
from feshrf.quantities import energy_to_khz, to_si
from feshrf.spectrum import ModelConfig, Spectrum, detuning_grid


class TestMain:
    """Test AssociationModel"""

    def test_model_attrs(
        self, model: AssociationModel, lab_config: DictConfig
    ):
        """测试模型的默认属性"""
        assert repr(model) == f"<AssociationModel-{__version__}>"
        assert model.name == "AssociationModel"
        assert model.version == __version__
        assert isinstance(model.settings, DictConfig)
        assert model.settings.field_gauss == lab_config.field_gauss
        assert model.field == pytest.approx(to_si(545.994, "G"))
        assert model.threads is None

    def test_default_parameters(self):
        """没有参数时使用结构化默认值"""
        model = AssociationModel()
        assert model.pulse.tau == pytest.approx(25e-6)
        assert model.mixture.temperature == pytest.approx(730e-9)

    def test_model_config(self, model: AssociationModel):
        """模型配置由各组件构建"""
        cfg = model.model_config()
        assert isinstance(cfg, ModelConfig)
        assert energy_to_khz(cfg.bound.E_b) == pytest.approx(54.85, rel=1e-3)
        assert cfg.trap.omega_tilde == pytest.approx(model.trap.omega_tilde)
        assert cfg.resonance is model.resonance
        other = model.model_config(field=to_si(545.5, "G"))
        assert other.bound.E_b > cfg.bound.E_b
        assert other.field == pytest.approx(to_si(545.5, "G"))

    def test_binding_override(self, reported_config):
        """配置中的结合能覆盖 E_b(B)"""
        model = AssociationModel(parameters=reported_config)
        energy = energy_to_khz(model.bound.E_b)
        assert energy == pytest.approx(127.6, rel=1e-12)
        assert model.fit_settings.max_iter == 100

    def test_spectrum(self, model: AssociationModel):
        """在网格上计算谱线"""
        grid = detuning_grid(model.model_config(), points=20)
        spectrum = model.spectrum(grid)
        assert isinstance(spectrum, Spectrum)
        assert len(spectrum) == 20
        assert np.all(spectrum.counts >= 0)

    def test_tail_temperature(self, reported_config):
        """尾部窗口以 k_BT 为单位"""
        model = AssociationModel(parameters=reported_config)
        cfg = model.model_config()
        data = model.spectrum(detuning_grid(cfg, points=120))
        result = model.tail_temperature(data, window=(2.5, 6.0))
        assert result.window == (2.5, 6.0)
        assert result.temperature == pytest.approx(730e-9, rel=0.05)

    def test_diagnostics_and_echo(self, model: AssociationModel):
        """诊断信息和配置回显"""
        notes = model.diagnostics()
        assert notes["perturbative_parameter"] == pytest.approx(0.19, abs=0.01)
        echo = model.echo()
        assert isinstance(echo, dict)
        assert echo["pulse"]["tau_us"] == 25.0


class TestBindingCurve:
    """结合能曲线"""

    def test_curve(self, model: AssociationModel):
        """靠近 B₀ 时结合能减小"""
        fields = to_si(np.linspace(545.2, 546.5, 6), "G")
        states = model.binding_curve(fields)
        energies = [state.E_b for state in states]
        assert len(states) == 6
        assert np.all(np.diff(energies) < 0)

    @pytest.mark.parametrize(
        "gauss",
        [[546.0, 547.0], [546.0, 546.618]],
        ids=["crossing", "on the pole"],
    )
    def test_pole(self, model: AssociationModel, gauss):
        """跨越或落在共振极点时报错"""
        with pytest.raises(PoleError):
            model.binding_curve(to_si(np.array(gauss), "G"))

    def test_no_bound_state(self, model: AssociationModel):
        """B₀ 以上没有分子"""
        with pytest.raises(NoBoundStateError, match="547"):
            model.binding_curve(to_si(np.array([547.0, 547.5]), "G"))


class TestValidate:
    """模型的独立检验"""

    def test_report(self, model: AssociationModel):
        """检验报告的结构"""
        report = model.validate(n=20_000, bins=20, grid_points=3)
        result = report.to_dict()
        assert set(result["checks"]) == {
            "relative_energy_gof",
            "cm_energy_gof",
            "energy_identity",
            "independence",
            "equipartition",
            "closed_form_density",
            "engine_vs_reference",
            "absolute_scale",
        }
        assert result["checks"]["energy_identity"]["passed"]
        assert result["checks"]["closed_form_density"]["passed"]
        assert result["checks"]["engine_vs_reference"]["passed"]
        assert result["diagnostics"]["seed"] == 42
        assert result["diagnostics"]["real_trap_coupling_share"] < 0
        note = result["diagnostics"]["binding_energy"]["note"]
        assert "not describe" in note

    def test_corrupted(self, model: AssociationModel):
        """错误的温度使检验失败"""
        report = model.validate(
            n=20_000, seed=3, bins=20, grid_points=2, corrupt_temperature=1.5
        )
        assert not report.all_passed
        failed = {check.name for check in report.checks if not check.passed}
        assert {"relative_energy_gof", "cm_energy_gof"} <= failed
