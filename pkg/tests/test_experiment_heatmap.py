import numpy as np
import pytest
from numpy.testing import assert_allclose

from skylink.errors import ResolutionError
from skylink.experiment.drop import DropSimulator
from skylink.experiment.heatmap import HeatmapAnalyzer, HeatmapGrid, hotspot_report, pixel_centers, sample_heatmap
from skylink.io.outputs import HEATMAP_COLUMNS, HOTSPOT_COLUMNS
from skylink.scenario import ScenarioConfig, derive_radio_constants, validate_config


def test_pixel_centers():
    axis = pixel_centers(1000.0, 10.0)
    assert len(axis) == 100
    assert axis[0] == pytest.approx(-495.0)
    assert_allclose(axis, -axis[::-1])
    assert len(pixel_centers(1000.0, 30.0)) == 34


def test_pixel_budget():
    cfg = validate_config(ScenarioConfig(heatmap_max_pixels=100))
    with pytest.raises(ResolutionError):
        HeatmapAnalyzer(cfg, resolution_m=10.0).compute()


def test_hotspots_need_compute():
    with pytest.raises(ValueError):
        HeatmapAnalyzer(validate_config(ScenarioConfig())).hotspots()


def test_small_heatmap():
    cfg = validate_config(ScenarioConfig(n_ue=57, n_drops=1))
    grid = sample_heatmap(cfg, resolution_m=100.0, extent_m=1000.0)
    assert grid.n_pixels == 100
    frame = grid.to_frame()
    assert list(frame.columns) == HEATMAP_COLUMNS
    assert len(frame) == 100
    assert np.all(np.isfinite(frame.values))
    assert np.all(grid.useful_dbm < 46.0)


def _synthetic_grid(cfg, resolution=10.0):
    axis = pixel_centers(2 * cfg.isd_m, resolution)
    xx, yy = np.meshgrid(axis, axis, indexing="xy")
    bump = np.zeros_like(xx)
    for az in (30.0, 150.0, 270.0):
        bx = cfg.isd_m / 3 * np.cos(np.radians(az))
        by = cfg.isd_m / 3 * np.sin(np.radians(az))
        bump += np.exp(-((xx - bx) ** 2 + (yy - by) ** 2) / (2 * 30.0 ** 2))
    return HeatmapGrid(x_m=axis, y_m=axis.copy(), resolution_m=resolution, sinr_db=10.0 - 5.0 * bump,
                       useful_dbm=np.full_like(xx, -60.0), interference_dbm=-76.0 + 5.0 * bump, n_drops=1)


def test_hotspot_report_finds_bumps():
    cfg = validate_config(ScenarioConfig())
    report = hotspot_report(_synthetic_grid(cfg), cfg)
    assert list(report.columns) == HOTSPOT_COLUMNS
    assert report["cell"].tolist() == [0, 1, 2]
    assert np.all(report["distance_m"] <= 10.0)
    assert report["is_local_max"].all()
    assert_allclose(report["ring_interference_dbm"], -76.0, atol=0.01)
    assert np.all(report["ring_radius_m"] >= 100.0)
    radio = derive_radio_constants(cfg)
    noise_mw = radio.noise_per_prb_mw * radio.n_prb
    hot_mw = 10 ** (report["interference_dbm"].to_numpy() / 10)
    expected = 10 * np.log10((hot_mw + noise_mw) / (10 ** -7.6 + noise_mw))
    assert_allclose(report["sinr_dip_db"], expected, atol=0.01)
    # 热点比背景高约 5 dB，噪声约 -87 dBm，下降量略低于 5 dB
    assert np.all((report["sinr_dip_db"] > 4.5) & (report["sinr_dip_db"] < 5.0))


def test_flat_interference_has_no_dip():
    cfg = validate_config(ScenarioConfig())
    grid = _synthetic_grid(cfg)
    flat = HeatmapGrid(x_m=grid.x_m, y_m=grid.y_m, resolution_m=grid.resolution_m,
                       sinr_db=np.full_like(grid.sinr_db, 10.0), useful_dbm=grid.useful_dbm, interference_dbm=np.full_like(grid.sinr_db, -80.0), n_drops=1)
    report = hotspot_report(flat, cfg)
    assert_allclose(report["sinr_dip_db"], 0.0, atol=1e-12)


def _rotate(points, degrees):
    c, s = np.cos(np.radians(degrees)), np.sin(np.radians(degrees))
    out = points.copy()
    out[:, 0] = c * points[:, 0] - s * points[:, 1]
    out[:, 1] = s * points[:, 0] + c * points[:, 1]
    return out


def _symmetric_config():
    return validate_config(ScenarioConfig(n_ue=57, n_drops=2, shadowing_sigma_db=0.0, los_mode="expectation"))


def test_useful_power_follows_sector_rotation():
    cfg = _symmetric_config()
    sim = DropSimulator(cfg, 0)
    sim.compute()
    rng = np.random.default_rng(6)
    radius = rng.uniform(20.0, 450.0, 150)
    angle = rng.uniform(0.0, 2 * np.pi, 150)
    points = np.column_stack([radius * np.cos(angle), radius * np.sin(angle), np.full(150, cfg.h_ue_m)])
    batch = np.vstack([points, _rotate(points, 120.0), _rotate(points, 240.0)])
    useful = 10 * np.log10(sim.evaluate_points(batch)[0]).reshape(3, -1)
    # 273 个 PRB 上的衰落平均后，单点起伏约 0.3 dB
    for turned in useful[1:]:
        assert np.median(np.abs(turned - useful[0])) < 0.3
        assert np.max(np.abs(turned - useful[0])) < 1.5


def test_sixty_degrees_moves_a_boresight_onto_a_valley():
    cfg = _symmetric_config()
    sim = DropSimulator(cfg, 0)
    sim.compute()
    boresight = np.array([[cfg.isd_m / 3 * np.cos(np.radians(30.0)), cfg.isd_m / 3 * np.sin(np.radians(30.0)),
                           cfg.h_ue_m]])
    useful = 10 * np.log10(sim.evaluate_points(np.vstack([boresight, _rotate(boresight, 60.0)]))[0])
    assert useful[0] - useful[1] > 3.0


def test_heatmap_is_mirror_symmetric_without_shadowing():
    grid = sample_heatmap(_symmetric_config(), resolution_m=50.0, extent_m=1000.0)
    diff = grid.useful_dbm - np.fliplr(grid.useful_dbm)
    assert np.median(np.abs(diff)) < 0.3
    assert np.max(np.abs(diff)) < 1.5
