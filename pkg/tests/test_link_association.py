import numpy as np
import pytest
from numpy.testing import assert_allclose

from skylink.experiment.drop import LinkBudget
from skylink.link import associate, compute_rsrp
from skylink.propagation import build_hex_layout
from skylink.propagation.channel import LargeScaleState
from skylink.scenario import ScenarioConfig, derive_radio_constants, validate_config


def test_identity_channel_rsrp():
    state = LargeScaleState.from_db(True, 0.0, 0.0, 0.0)
    assert compute_rsrp(state, 20.0) == pytest.approx(20.0)


def test_strongest_cell_wins():
    amap = associate(np.array([[-80.0, -90.0], [-95.0, -85.0]]))
    assert list(amap.serving_cell) == [0, 1]
    assert list(amap.load) == [1, 1]


def test_tie_goes_to_lowest_index():
    rsrp = np.full((1, 10), -120.0)
    rsrp[0, 3] = rsrp[0, 7] = -70.0
    assert associate(rsrp).serving_cell[0] == 3


def test_dominant_column_serves_everyone():
    rsrp = np.random.default_rng(0).uniform(-130, -100, size=(20, 5))
    rsrp[:, 2] = -50.0
    amap = associate(rsrp)
    assert np.all(amap.serving_cell == 2)
    assert list(amap.load) == [0, 0, 20, 0, 0]
    assert_allclose(amap.served[2], np.arange(20))


def _ntn_budget(n_ue=570):
    cfg = validate_config(ScenarioConfig(n_ue=n_ue, shadowing_sigma_db=0.0, los_mode="expectation"))
    dep = build_hex_layout(cfg, np.random.default_rng(11))
    return cfg, dep, LinkBudget(cfg, derive_radio_constants(cfg), dep)


def test_boresight_ground_point_is_served_by_its_sector():
    cfg, dep, budget = _ntn_budget()
    points = np.column_stack([dep.boresight_points, np.full(dep.n_cells, cfg.h_ue_m)])
    rng = np.random.default_rng(0)
    state = budget.large_scale_for(points, rng, rng)
    assert np.all(np.argmax(state.beta_db, axis=1) == np.arange(dep.n_cells))


def test_every_cell_serves_someone_without_shadowing():
    cfg, dep, budget = _ntn_budget()
    rng = np.random.default_rng(0)
    state = budget.large_scale_for(dep.ues, rng, rng)
    amap = associate(budget.radio.prb_tx_power_dbm + state.beta_db)
    assert np.all(amap.load >= 1)
    assert amap.load.sum() == cfg.n_ue


def test_common_power_scaling_keeps_the_association():
    cfg, dep, budget = _ntn_budget()
    state = budget.large_scale_for(dep.ues, np.random.default_rng(4), np.random.default_rng(5))
    base = associate(compute_rsrp(state, budget.radio.prb_tx_power_dbm))
    for offset_db in (-30.0, -3.0, 7.5, 20.0):
        scaled = associate(compute_rsrp(state, budget.radio.prb_tx_power_dbm + offset_db))
        assert np.array_equal(scaled.serving_cell, base.serving_cell)
        assert np.array_equal(scaled.load, base.load)


def test_transmit_power_does_not_move_terrestrial_association():
    low = validate_config(ScenarioConfig(deployment_kind="TN5G", n_ue=57, tx_power_dbm=30.0))
    high = validate_config(ScenarioConfig(deployment_kind="TN5G", n_ue=57, tx_power_dbm=49.0))
    dep = build_hex_layout(low, np.random.default_rng(8))
    serving = []
    for cfg in (low, high):
        budget = LinkBudget(cfg, derive_radio_constants(cfg), dep)
        state = budget.large_scale_for(dep.ues, np.random.default_rng(1), np.random.default_rng(2))
        serving.append(associate(compute_rsrp(state, budget.radio.prb_tx_power_dbm)).serving_cell)
    assert np.array_equal(serving[0], serving[1])
