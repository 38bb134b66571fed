import math

import pytest
from numpy.testing import assert_allclose

from skylink.errors import RangeError
from skylink.scenario import DeploymentKind, ScenarioConfig, derive_radio_constants, noise_power_dbm, validate_config
from skylink.scenario.radio import prb_count


def _radio(kind, **kwargs):
    return derive_radio_constants(validate_config(ScenarioConfig(deployment_kind=kind, **kwargs)))


def test_5g_prb_grid_and_noise():
    radio = _radio(DeploymentKind.TN5G)
    assert radio.n_prb == 273
    assert radio.prb_bandwidth_hz == 360e3
    assert_allclose(radio.noise_per_prb_dbm, -174.0 + 10.0 * math.log10(360e3) + 7.0, rtol=1e-12)
    assert radio.noise_per_prb_dbm == pytest.approx(-111.44, abs=0.01)


def test_4g_prb_grid_fits_channel():
    radio = _radio(DeploymentKind.TN4G)
    assert radio.n_prb == 100
    assert radio.prb_bandwidth_hz == 180e3
    assert radio.n_prb * radio.prb_bandwidth_hz <= 20e6


def test_ntn_wavelength():
    radio = _radio(DeploymentKind.NTN5G)
    assert radio.wavelength_m == pytest.approx(0.0857, abs=1e-4)
    assert radio.n_prb == 273


def test_total_power_is_split_over_prbs():
    radio = _radio(DeploymentKind.NTN5G)
    assert_allclose(radio.prb_tx_power_dbm, 43.0 - 10.0 * math.log10(273), rtol=1e-12)
    assert_allclose(radio.prb_tx_power_mw * radio.n_prb, 10.0 ** 4.3, rtol=1e-9)


def test_noise_power_formula():
    assert_allclose(noise_power_dbm(1.0, 0.0), -174.0)
    assert_allclose(noise_power_dbm(1e6, 7.0), -107.0)


def test_non_standard_bandwidth_uses_occupancy_fallback():
    assert prb_count(25e6, 30e3) == 62
    assert prb_count(100e6, 30e3) == 273


@pytest.mark.parametrize("kind, bandwidth", [
    (DeploymentKind.TN5G, 200e3),
    (DeploymentKind.NTN5G, 360e3),
    (DeploymentKind.TN4G, 150e3),
])
def test_bandwidth_below_one_prb_is_rejected(kind, bandwidth):
    with pytest.raises(RangeError) as err:
        validate_config(ScenarioConfig(deployment_kind=kind, bandwidth_hz=bandwidth))
    assert err.value.field == "bandwidth_hz"
    with pytest.raises(RangeError):
        prb_count(bandwidth, 30e3 if kind is not DeploymentKind.TN4G else 15e3)


@pytest.mark.parametrize("kind, bandwidth", [
    (DeploymentKind.TN5G, 401e3),
    (DeploymentKind.TN5G, 7.3e6),
    (DeploymentKind.TN4G, 201e3),
    (DeploymentKind.TN4G, 20e6),
    (DeploymentKind.NTN5G, 100e6),
])
def test_occupied_prbs_fit_the_channel(kind, bandwidth):
    radio = _radio(kind, bandwidth_hz=bandwidth)
    assert radio.n_prb >= 1
    assert radio.n_prb * radio.prb_bandwidth_hz <= bandwidth
