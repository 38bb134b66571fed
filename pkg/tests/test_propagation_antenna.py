import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import j1

from skylink.propagation.antenna import (FIRST_NULL_X, PATTERN_FLOOR_DB, ElementPattern, ReflectorAntenna,
                                         SectorAntenna, array_factor, reflector_gain, tn_beam_gain,
                                         tn_element_gain)
from skylink.scenario import DeploymentKind, ScenarioConfig, validate_config


def test_reflector_peak_gain():
    ant = ReflectorAntenna(25)
    assert_allclose(ant.peak_gain_dbi, 10 * math.log10((2 * math.pi * 25) ** 2), rtol=1e-12)
    assert ant.peak_gain_dbi == pytest.approx(43.93, abs=0.02)
    assert reflector_gain(ant, 0.0) == pytest.approx(ant.peak_gain_dbi)


def test_efficiency_scales_peak():
    assert_allclose(ReflectorAntenna(25, 0.5).peak_gain_dbi,
                    ReflectorAntenna(25).peak_gain_dbi + 10 * math.log10(0.5), rtol=1e-12)


@pytest.mark.parametrize("radius", [5, 15, 25, 50])
def test_half_power_point(radius):
    ant = ReflectorAntenna(radius)
    level = 10 * np.log10(ant.normalized_pattern(ant.hpbw_deg / 2))
    assert abs(level + 10 * math.log10(2)) < 0.01


def test_first_null_position():
    ant = ReflectorAntenna(25)
    assert ant.first_null_deg == pytest.approx(1.398, abs=1e-3)
    assert abs(j1(FIRST_NULL_X)) < 1e-3
    assert_allclose(10 * np.log10(ant.normalized_pattern(ant.first_null_deg)), PATTERN_FLOOR_DB, atol=1e-6)


def test_pattern_decreases_across_main_lobe():
    ant = ReflectorAntenna(25)
    theta = np.linspace(0.0, 0.99 * ant.first_null_deg, 50)
    assert np.all(np.diff(ant.normalized_pattern(theta)) < 0)


def test_pattern_is_floored_everywhere():
    ant = ReflectorAntenna(25)
    pattern = ant.normalized_pattern(np.linspace(-90, 90, 2001))
    assert pattern.min() >= 10 ** (PATTERN_FLOOR_DB / 10) * (1 - 1e-12)
    assert pattern.max() <= 1.0 + 1e-12


def test_element_pattern_cuts():
    pat = ElementPattern()
    assert tn_element_gain(pat, 90.0, 0.0) == pytest.approx(8.0)
    assert tn_element_gain(pat, 90.0, 65.0) == pytest.approx(-4.0)
    assert tn_element_gain(pat, 90.0, 180.0) == pytest.approx(-22.0)
    assert tn_element_gain(pat, 0.0, 180.0) == pytest.approx(-22.0)


def test_steered_array_peak():
    ant = SectorAntenna(rows=8, cols=8, beam_mode="ue")
    gain = tn_beam_gain(ant, (90.0, 0.0), (90.0, 0.0))
    assert gain == pytest.approx(8 + 10 * math.log10(64))
    off = tn_beam_gain(ant, (100.0, 20.0), (100.0, 20.0))
    assert_allclose(off, tn_element_gain(ant.element, 100.0, 20.0) + 10 * math.log10(64), rtol=1e-12)


def test_single_element_array_matches_element():
    ant = SectorAntenna()
    theta = np.array([60.0, 90.0, 120.0])
    phi = np.array([-40.0, 0.0, 75.0])
    assert_allclose(tn_beam_gain(ant, (80.0, 10.0), (theta, phi)), tn_element_gain(ant.element, theta, phi))


def test_array_null_is_floored():
    ant = SectorAntenna(rows=1, cols=8, beam_mode="ue")
    null_phi = math.degrees(math.asin(2.0 / 8.0))
    gain = ant.steering_gain((90.0, 0.0), (90.0, null_phi))
    assert 10 * math.log10(gain) <= 10 * math.log10(8) + PATTERN_FLOOR_DB + 1e-9


def test_array_factor_peak_and_mean():
    psi = np.linspace(-np.pi, np.pi, 4001)[:-1]
    af = array_factor(8, psi)
    assert af.max() == pytest.approx(8.0)
    # 功率阵因子在一个周期上的均值为 1
    assert af.mean() == pytest.approx(1.0, rel=1e-3)


def test_sector_antenna_for_config():
    tn4g = SectorAntenna.for_config(validate_config(ScenarioConfig(deployment_kind=DeploymentKind.TN4G)))
    tn5g = SectorAntenna.for_config(validate_config(ScenarioConfig(deployment_kind=DeploymentKind.TN5G)))
    assert not tn4g.steered and tn4g.beam_mode == "fixed"
    assert tn4g.sector_gain(90.0, 0.0) == pytest.approx(17.0)
    assert not tn5g.steered and tn5g.beam_mode == "sector"
    assert (tn5g.rows, tn5g.cols) == (8, 1)
    assert tn5g.max_gain_dbi == pytest.approx(8 + 10 * math.log10(8))


def test_per_ue_steering_from_config():
    cfg = validate_config(ScenarioConfig(deployment_kind=DeploymentKind.TN5G, tn_beam_mode="ue", tn_array_cols=8))
    ant = SectorAntenna.for_config(cfg)
    assert ant.steered and ant.n_elements == 64
    assert ant.max_gain_dbi == pytest.approx(8 + 10 * math.log10(64))
    # RSRP 只用单元增益
    assert ant.sector_gain(90.0, 0.0) == pytest.approx(8.0)


def test_fixed_sector_beam_gain():
    ant = SectorAntenna(rows=8, cols=1, beam_mode="sector")
    assert ant.sector_gain(90.0, 0.0) == pytest.approx(8 + 10 * math.log10(8))
    theta = np.array([95.0, 100.0, 110.0])
    expected = tn_beam_gain(ant, (90.0, 0.0), (theta, np.zeros(3)))
    assert_allclose(ant.sector_gain(theta, 0.0), expected, rtol=1e-12)
    # 垂直方向的半功率宽度约 13°，偏离 10° 已明显低于单元方向图
    assert ant.sector_gain(100.0, 0.0) < tn_element_gain(ant.element, 100.0, 0.0) + 10 * math.log10(8) - 6.0
    # 水平方向只有一列，不做赋形
    assert ant.sector_gain(90.0, 40.0) - ant.sector_gain(90.0, 0.0) == pytest.approx(
        ElementPattern().attenuation(90.0, 40.0))


def test_fixed_sector_beam_is_symmetric():
    ant = SectorAntenna(rows=8, cols=4, beam_mode="sector")
    phi = np.linspace(0.0, 80.0, 9)
    assert_allclose(ant.sector_gain(97.0, phi), ant.sector_gain(97.0, -phi), rtol=1e-12)


def test_unknown_beam_mode():
    with pytest.raises(ValueError):
        SectorAntenna(beam_mode="wide")


def test_fixed_mode_ignores_the_array():
    ant = SectorAntenna(rows=8, cols=8, beam_mode="fixed")
    assert ant.max_gain_dbi == pytest.approx(8.0)
    assert ant.sector_gain(90.0, 0.0) == pytest.approx(ant.max_gain_dbi)
