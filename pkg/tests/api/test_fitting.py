#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang (Twist) Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
测试谱线拟合、共振拟合和自洽迭代。
"""

from dataclasses import replace

import numpy as np
import pytest

from feshrf import AssociationModel, fitting
from feshrf.errors import (
    BoundaryError,
    DataError,
    DegenerateDataError,
    FitError,
    InvalidBranchError,
    IterationError,
)
from feshrf.fitting import (
    FitSettings,
    fit_resonance,
    fit_spectrum,
    fit_tail_temperature,
    initial_guess,
    self_consistent_chi_iteration,
)
from feshrf.quantities import (
    CONSTANTS,
    energy_to_khz,
    from_si,
    khz_to_energy,
    to_si,
)
from feshrf.resonance import ResonanceParams, binding_energy_from_field
from feshrf.spectrum import (
    ModelConfig,
    Spectrum,
    compute_spectrum,
    detuning_grid,
    spectral_edge,
    synthetic_spectrum,
)

TRUE = ResonanceParams.from_lab()


@pytest.fixture(name="data_60khz")
def fixture_data_60khz(cfg_60khz: ModelConfig, grid: np.ndarray) -> Spectrum:
    """60 kHz 分子的无噪声谱线"""
    return compute_spectrum(grid, cfg_60khz)


def _scan_grid(cfg, points):
    """From 10 kHz below the edge to 10 k_BT/h above it, in Hz."""
    edge = spectral_edge(cfg)
    return np.linspace(
        edge - 10e3, edge + 10.0 * cfg.mix.kT / CONSTANTS.planck_h, points
    )


def _noisy(grid, cfg, pattern):
    """Counts times `pattern`; σ is 5% of the model, at least 1% of peak."""
    model = compute_spectrum(grid, cfg)
    sigma = 0.05 * np.maximum(model.counts, 0.01 * model.counts.max())
    return Spectrum(model.frequency, model.counts * pattern, sigma)


def _points(gauss, params=TRUE, relative_sigma=0.01):
    """Noiseless (B, E_b, σ) triples."""
    points = []
    for value in gauss:
        B = to_si(value, "G")
        energy = binding_energy_from_field(B, params)
        points.append((B, energy, relative_sigma * energy))
    return points


def _noisy_points(gauss, seed, relative_sigma=0.01):
    """(B, E_b, σ) triples with E_b scattered by `relative_sigma`."""
    rng = np.random.default_rng(seed)
    scatter = 1.0 + relative_sigma * rng.standard_normal(len(gauss))
    return [
        (B, energy * k, sigma)
        for (B, energy, sigma), k in zip(_points(gauss), scatter)
    ]


class TestInitialGuess:
    """初始值"""

    def test_near_truth(self, data_60khz, cfg_60khz):
        """初始结合能在真值 15 kHz 以内"""
        E_init, scale = initial_guess(data_60khz, cfg_60khz)
        assert abs(energy_to_khz(E_init) - 60.0) < 15.0
        assert scale > 0

    def test_scale_follows_data(self, data_60khz, cfg_60khz):
        """数据放大三倍时 λ 也放大三倍"""
        _, scale = initial_guess(data_60khz, cfg_60khz)
        _, tripled = initial_guess(data_60khz.scaled(3.0), cfg_60khz)
        assert tripled == pytest.approx(3.0 * scale, rel=1e-12)

    @pytest.mark.parametrize(
        "counts",
        [
            [1.0, 2.0, 3.0, 4.0],
            [4.0, 3.0, 2.0, 1.0],
            [2.0, 2.0, 2.0, 2.0],
            [1.0, 2.0],
        ],
        ids=["increasing", "decreasing", "flat", "too short"],
    )
    def test_degenerate(self, cfg_60khz, grid, counts):
        """没有内部峰值时报错"""
        data = Spectrum(grid[: len(counts)], counts)
        with pytest.raises(DegenerateDataError):
            initial_guess(data, cfg_60khz)


class TestFitSpectrum:
    """拟合结合能和比例因子"""

    def test_noiseless(self, data_60khz, cfg_60khz):
        """无噪声数据恢复真值"""
        result = fit_spectrum(data_60khz, cfg_60khz)
        assert result.converged
        assert result.E_b_khz == pytest.approx(60.0, rel=1e-5)
        assert result.scale == pytest.approx(1.0, rel=1e-5)
        assert result.covariance.shape == (2, 2)
        assert result.residuals.size == len(data_60khz)
        summary = result.to_dict()
        assert summary["binding_energy_khz"] == result.E_b_khz
        assert summary["converged"] is True

    def test_noisy(self, cfg_60khz, edge_grid):
        """2% 噪声时真值在误差范围内"""
        grid = edge_grid(cfg_60khz, below_khz=10.0)
        data = synthetic_spectrum(
            grid, cfg_60khz, noise=0.02, seed=42, with_uncertainty=True
        )
        result = fit_spectrum(data, cfg_60khz)
        assert result.E_b_err_khz > 0
        assert abs(result.E_b_khz - 60.0) < 5 * result.E_b_err_khz + 1e-3
        assert abs(result.scale - 1.0) < 5 * result.scale_err + 1e-6

    def test_rescaled_data(self, cfg_60khz, edge_grid):
        """数据乘以 4 时结合能不变，λ 乘以 4"""
        grid = edge_grid(cfg_60khz, below_khz=10.0)
        data = synthetic_spectrum(
            grid, cfg_60khz, noise=0.02, seed=1, with_uncertainty=True
        )
        base = fit_spectrum(data, cfg_60khz)
        scaled = fit_spectrum(data.scaled(4.0), cfg_60khz)
        assert scaled.E_b == pytest.approx(base.E_b, rel=1e-12)
        assert scaled.scale == pytest.approx(4.0 * base.scale, rel=1e-10)

    def test_not_converged(self, data_60khz, cfg_60khz):
        """迭代次数用尽时报错并保留最好的状态"""
        with pytest.raises(FitError) as info:
            fit_spectrum(
                data_60khz, cfg_60khz, settings=FitSettings(max_iter=1)
            )
        assert info.value.result is not None
        assert not info.value.result.converged

    def test_bad_uncertainty(self, data_60khz, cfg_60khz):
        """不确定度必须为正"""
        sigma = np.ones(len(data_60khz))
        sigma[3] = 0.0
        data = Spectrum(data_60khz.frequency, data_60khz.counts, sigma)
        with pytest.raises(DataError):
            fit_spectrum(data, cfg_60khz)

    @pytest.mark.parametrize(
        "init", [None, (khz_to_energy(60.0), 1.0)], ids=["guessed", "given"]
    )
    def test_no_signal(self, cfg_60khz, grid, init):
        """λ = 0 的数据（全部为零）无法确定结合能"""
        data = Spectrum(grid, np.zeros(len(grid)))
        with pytest.raises(BoundaryError, match="not identifiable"):
            fit_spectrum(data, cfg_60khz, init=init)

    def test_error_shrinks_with_points(self, cfg_60khz):
        """点数增加四倍时结合能误差减半"""
        errors = []
        for points in (20, 80):
            pattern = 1.0 + 0.05 * (-1.0) ** np.arange(points)
            data = _noisy(_scan_grid(cfg_60khz, points), cfg_60khz, pattern)
            errors.append(fit_spectrum(data, cfg_60khz).E_b_err)
        assert errors[0] / errors[1] == pytest.approx(2.0, abs=0.3)

    @pytest.mark.slow
    @pytest.mark.parametrize("scale", [0.5, 2.0])
    @pytest.mark.parametrize("binding_khz", [30.0, 60.0, 120.0])
    def test_noisy_recovery(self, cfg, binding_khz, scale):
        """5% 噪声、40 个点：多个种子的中位数误差 E_b < 2%，λ < 5%"""
        energy = khz_to_energy(binding_khz)
        truth = cfg.with_binding_energy(energy).with_scale(scale)
        grid = _scan_grid(truth, 40)
        e_errors, s_errors = [], []
        for seed in range(15):
            rng = np.random.default_rng(seed)
            data = _noisy(grid, truth, 1.0 + 0.05 * rng.standard_normal(40))
            result = fit_spectrum(data, cfg)
            e_errors.append(abs(result.E_b_khz / binding_khz - 1.0))
            s_errors.append(abs(result.scale / scale - 1.0))
        assert np.median(e_errors) < 0.02
        assert np.median(s_errors) < 0.05


class TestFitResonance:
    """由结合能曲线拟合 B₀ 和 ΔB"""

    def test_noiseless(self):
        """从偏离的初值恢复 B₀ 和 ΔB"""
        start = ResonanceParams.from_lab(b0_gauss=546.5, delta_b_gauss=2.5)
        points = _points([545.4, 545.7, 545.994, 546.2])
        result = fit_resonance(points, start, FitSettings(xtol=1e-12))
        assert result.converged
        assert from_si(result.B0, "G") == pytest.approx(546.618, rel=1e-8)
        assert from_si(result.DeltaB, "G") == pytest.approx(3.04, rel=1e-8)
        assert result.to_dict()["b0_gauss"] == pytest.approx(546.618, abs=1e-4)

    def test_straddle(self):
        """数据跨越共振极点时报错"""
        points = _points([545.4, 545.7, 545.994])
        points.append((to_si(547.0, "G"), points[0][1], points[0][2]))
        with pytest.raises(InvalidBranchError):
            fit_resonance(points, TRUE)

    def test_too_few(self):
        """点数不足"""
        with pytest.raises(DataError):
            fit_resonance(_points([545.4, 545.7]), TRUE)

    def test_bad_sigma(self):
        """σ 必须为正"""
        points = [(B, E, 0.0) for B, E, _ in _points([545.4, 545.7, 546.0])]
        with pytest.raises(DataError):
            fit_resonance(points, TRUE)

    def test_noisy_six_fields(self):
        """1% 噪声、六个磁场：多个种子的中位数误差 B₀ < 10 mG，ΔB < 0.05 G"""
        gauss = np.linspace(545.73, 546.19, 6)
        b0_errors, width_errors = [], []
        for seed in range(30):
            result = fit_resonance(_noisy_points(gauss, seed), TRUE)
            b0_errors.append(abs(from_si(result.B0, "G") - 546.618))
            width_errors.append(abs(from_si(result.DeltaB, "G") - 3.04))
        assert np.median(b0_errors) < 0.01
        assert np.median(width_errors) < 0.05

    def test_normal_equations(self):
        """收敛点满足 Jᵀr = 0"""
        points = _noisy_points(np.linspace(545.73, 546.19, 6), seed=7)
        tight = FitSettings(xtol=1e-12, gtol=1e-12)
        result = fit_resonance(points, TRUE, tight)
        res = result.residuals
        for column in result.jacobian.T:
            norms = np.linalg.norm(column) * np.linalg.norm(res)
            assert abs(column @ res) / norms < 1e-8

    def test_width_on_bound(self, monkeypatch):
        """ΔB 停在下界 0 时报边界错误"""
        solve = fitting.optimize.least_squares

        def collapsed(*args, **kwargs):
            solution = solve(*args, **kwargs)
            solution.x = np.array([solution.x[0], 0.0])
            solution.active_mask = np.array([0, -1])
            return solution

        monkeypatch.setattr(fitting.optimize, "least_squares", collapsed)
        with pytest.raises(BoundaryError, match="DeltaB"):
            fit_resonance(_points([545.4, 545.7, 546.0]), TRUE)

    def test_singular_keeps_result(self, monkeypatch):
        """JᵀJ 奇异时报错，但保留拟合结果"""
        solve = fitting.optimize.least_squares

        def flat(*args, **kwargs):
            solution = solve(*args, **kwargs)
            solution.jac = np.ones_like(solution.jac)
            return solution

        monkeypatch.setattr(fitting.optimize, "least_squares", flat)
        with pytest.raises(FitError, match="identifiable") as info:
            fit_resonance(_points([545.4, 545.7, 546.0]), TRUE)
        result = info.value.result
        assert result is not None
        assert from_si(result.B0, "G") == pytest.approx(546.618, abs=1e-4)
        assert np.all(np.isnan(result.covariance))


class TestTailTemperature:
    """由高频尾部拟合温度"""

    def test_recovers_temperature(self, reported_config):
        """127.6 kHz 谱线的尾部给出 730 nK（5% 以内）"""
        model = AssociationModel(parameters=reported_config)
        cfg = model.model_config()
        data = compute_spectrum(detuning_grid(cfg, points=120), cfg)
        result = fit_tail_temperature(data, cfg)
        expected = cfg.mix.temperature
        assert result.temperature == pytest.approx(expected, rel=0.05)
        assert result.n_points >= 4
        assert result.window == (2.0, 5.0)

    def test_empty_window(self, data_60khz, cfg_60khz):
        """窗口内没有足够的点"""
        with pytest.raises(DataError):
            fit_tail_temperature(data_60khz, cfg_60khz, window=(50.0, 60.0))


class TestIteration:
    """χ 的自洽迭代"""

    @pytest.fixture(name="datasets")
    def fixture_datasets(self, model: AssociationModel, edge_grid):
        """三个磁场下的无噪声谱线"""
        datasets = []
        for gauss in (545.6, 545.994, 546.2):
            B = to_si(gauss, "G")
            cfg = model.model_config(field=B)
            spectrum = compute_spectrum(edge_grid(cfg, step_khz=5.0), cfg)
            datasets.append((B, spectrum))
        return datasets

    def test_input_checks(self, cfg, datasets):
        """至少两条谱线，磁场互不相同"""
        with pytest.raises(DataError):
            self_consistent_chi_iteration(datasets[:1], cfg, TRUE)
        with pytest.raises(DataError):
            self_consistent_chi_iteration(
                [datasets[0], datasets[0]], cfg, TRUE
            )

    @pytest.mark.slow
    def test_converges(self, cfg, datasets):
        """从偏离的 ΔB 出发收敛到真值"""
        start = replace(TRUE, DeltaB=to_si(2.8, "G"))
        result = self_consistent_chi_iteration(datasets, cfg, start)
        assert result.converged
        width = from_si(result.params.DeltaB, "G")
        assert width == pytest.approx(3.04, abs=1e-2)
        assert from_si(result.params.B0, "G") == pytest.approx(
            546.618, abs=1e-2
        )
        assert len(result.trace) == result.rounds
        assert len(result.spectrum_fits) == 3
        assert result.to_dict()["converged"] is True

    @pytest.mark.slow
    def test_round_limit(self, cfg, datasets):
        """轮数用尽时报错并保留 ΔB 的轨迹"""
        start = replace(TRUE, DeltaB=to_si(2.8, "G"))
        with pytest.raises(IterationError) as info:
            self_consistent_chi_iteration(
                datasets, cfg, start, FitSettings(max_rounds=1)
            )
        assert len(info.value.trace) == 1
        assert not info.value.result.converged
