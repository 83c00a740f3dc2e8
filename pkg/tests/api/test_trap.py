#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang (Twist) Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
测试势阱中的配对统计。
"""

import math

import numpy as np
import pytest
from scipy import integrate

from feshrf.errors import DomainError
from feshrf.quantities import CONSTANTS
from feshrf.trap import (
    EffectiveTrap,
    MixtureState,
    TrapConfig,
    dos_center_of_mass,
    dos_swave,
    effective_trap,
    mismatch_ratio,
    pair_energy_density,
    pair_energy_density_quadrature,
    pair_occupation,
    single_atom_occupation,
    total_pair_number,
)


@pytest.fixture(name="trap_cfg")
def fixture_trap_cfg() -> TrapConfig:
    """K 在 335 Hz、Rb 在 244 Hz 的势阱"""
    return TrapConfig.from_hz(335.0, 244.0)


@pytest.fixture(name="mix")
def fixture_mix() -> MixtureState:
    """默认的原子数和温度"""
    return MixtureState(n_a=5e5, n_b=2.5e5, temperature=730e-9)


@pytest.fixture(name="trap")
def fixture_trap(trap_cfg: TrapConfig) -> EffectiveTrap:
    """有效势阱"""
    return effective_trap(trap_cfg)


class TestTrap:
    """势阱频率"""

    def test_effective_frequency(self, trap: EffectiveTrap):
        """ω̃ = 2π·√(335·244) Hz"""
        expected = 2 * math.pi * math.sqrt(335.0 * 244.0)
        assert trap.omega_tilde == pytest.approx(expected, rel=1e-12)
        mean_hz = trap.omega_tilde / (2 * math.pi)
        assert mean_hz == pytest.approx(285.9, abs=0.05)
        assert trap.omega_bar == pytest.approx((expected,) * 3)

    def test_quantum_over_kT(self, trap: EffectiveTrap, mix: MixtureState):
        """ħω̃/k_BT ≈ 0.0188"""
        assert trap.quantum / mix.kT == pytest.approx(0.018797, rel=1e-3)

    def test_per_axis(self):
        """各轴频率分别取几何平均"""
        cfg = TrapConfig.from_hz([100.0, 200.0, 400.0], [400.0, 200.0, 100.0])
        trap = effective_trap(cfg)
        assert np.allclose(trap.omega_bar, [2 * math.pi * 200.0] * 3)

    def test_mismatch(self, trap_cfg: TrapConfig):
        """频率失配 335/244 − 1"""
        ratio = mismatch_ratio(trap_cfg)
        assert ratio == pytest.approx((335.0 / 244.0 - 1.0,) * 3)
        assert mismatch_ratio(TrapConfig.matched(1.0)) == (0.0, 0.0, 0.0)

    @pytest.mark.parametrize(
        "freq_a, freq_b",
        [([1.0, 2.0], 1.0), (-1.0, 1.0), (0.0, 1.0)],
        ids=["two axes", "negative", "zero"],
    )
    def test_invalid_frequencies(self, freq_a, freq_b):
        """频率必须是正数，并给出 1 或 3 个"""
        with pytest.raises(DomainError):
            TrapConfig.from_hz(freq_a, freq_b)

    def test_mixture_validation(self):
        """温度必须为正，原子数非负"""
        with pytest.raises(DomainError):
            MixtureState(1.0, 1.0, 0.0)
        with pytest.raises(DomainError):
            MixtureState(-1.0, 1.0, 1e-6)


class TestOccupation:
    """单原子和原子对的占据数"""

    def test_single_atom(self, trap: EffectiveTrap, mix: MixtureState):
        """f(0) = N(ħω̃/k_BT)³ ≈ 3.32"""
        value = single_atom_occupation(0.0, mix.n_a, trap, mix.temperature)
        assert float(value) == pytest.approx(3.32, rel=2e-3)

    def test_single_atom_own_trap(self, mix: MixtureState):
        """用原子自己的频率"""
        omega = 2 * math.pi * 335.0
        value = single_atom_occupation(0.0, mix.n_a, omega, mix.temperature)
        ratio = CONSTANTS.hbar * omega / mix.kT
        assert float(value) == pytest.approx(mix.n_a * ratio**3, rel=1e-12)

    def test_pair(self, trap: EffectiveTrap, mix: MixtureState):
        """f_p(0) ≈ 5.51，并随 exp(−ε/k_BT) 衰减"""
        ground = pair_occupation(0.0, mix, trap)
        assert float(ground) == pytest.approx(5.51, rel=2e-3)
        ratio = pair_occupation(mix.kT, mix, trap) / ground
        assert float(ratio) == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_negative_energy(self, trap: EffectiveTrap, mix: MixtureState):
        """负能量报错"""
        with pytest.raises(DomainError):
            pair_occupation(-1e-30, mix, trap)
        with pytest.raises(DomainError):
            pair_energy_density(np.array([0.0, -1.0]), mix, trap)


class TestDensity:
    """态密度与配对能量分布"""

    def test_dos(self, trap: EffectiveTrap, mix: MixtureState):
        """g_cm(k_BT) ≈ 7.47e33 J⁻¹，g_r ≈ 2.639e30 J⁻¹"""
        assert float(dos_center_of_mass(mix.kT, trap)) == pytest.approx(
            7.47e33, rel=2e-3
        )
        assert dos_swave(trap) == pytest.approx(2.639e30, rel=1e-3)
        assert float(dos_center_of_mass(0.0, trap)) == 0.0

    def test_pair_density(self, trap: EffectiveTrap, mix: MixtureState):
        """h(0) ≈ 2.191e36 J⁻¹"""
        assert float(pair_energy_density(0.0, mix, trap)) == pytest.approx(
            2.191e36, rel=2e-3
        )

    def test_total_pairs(self, trap: EffectiveTrap, mix: MixtureState):
        """∫h dε ≈ 2.208e7，与数值积分一致"""
        total = total_pair_number(mix, trap)
        assert total == pytest.approx(2.208e7, rel=2e-3)

        def integrand(x):
            return float(pair_energy_density(x * mix.kT, mix, trap)) * mix.kT

        numeric, _ = integrate.quad(integrand, 0.0, np.inf)
        assert numeric == pytest.approx(total, rel=1e-8)

    @pytest.mark.parametrize(
        "energy_kT", [0.0, 0.5, 1.0, 3.0, 10.0, 20.0], ids=lambda x: f"{x} kT"
    )
    def test_closed_form(
        self, trap: EffectiveTrap, mix: MixtureState, energy_kT
    ):
        """闭式 h(ε_r) 等于对质心能量的积分"""
        eps = energy_kT * mix.kT
        closed = float(pair_energy_density(eps, mix, trap))
        numeric = pair_energy_density_quadrature(eps, mix, trap, rel_tol=1e-12)
        assert numeric == pytest.approx(closed, rel=1e-8)

    def test_vectorized(self, trap: EffectiveTrap, mix: MixtureState):
        """数组输入"""
        eps = np.linspace(0.0, 5.0, 11) * mix.kT
        values = pair_energy_density(eps, mix, trap)
        assert values.shape == (11,)
        assert np.all(np.diff(values) < 0)

    def test_no_atoms(self, trap: EffectiveTrap):
        """没有原子时分布为零"""
        mix = MixtureState(0.0, 1e5, 1e-6)
        assert float(pair_energy_density(0.0, mix, trap)) == 0.0
