import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from skylink.errors import DegenerateLinkError, DomainError
from skylink.propagation import (build_hex_layout, compute_tilt, deployment_link_geometry, footprint_radius,
                                 link_geometry)
from skylink.propagation.antenna import ReflectorAntenna
from skylink.propagation.geometry import build_cells, footprints, hex_site_positions, in_sector_wedge
from skylink.scenario import DeploymentKind, ScenarioConfig, validate_config


def test_hex_grid_has_two_rings():
    sites = hex_site_positions(500.0)
    assert sites.shape == (19, 2)
    radius = np.hypot(sites[:, 0], sites[:, 1])
    assert_allclose(sites[0], [0.0, 0.0], atol=1e-9)
    assert_allclose(radius[1:7], 500.0)
    assert_allclose(np.sort(radius[7:]), [500 * math.sqrt(3)] * 6 + [1000.0] * 6)


def test_layout_counts_and_determinism():
    cfg = validate_config(ScenarioConfig())
    a = build_hex_layout(cfg, np.random.default_rng(3))
    b = build_hex_layout(cfg, np.random.default_rng(3))
    assert a.n_cells == 57
    assert a.ues.shape == (570, 3)
    assert np.all(np.bincount(a.ue_cell, minlength=57) == 10)
    assert_allclose(a.ues, b.ues, rtol=0, atol=0)


def test_ues_stay_inside_their_sector_wedge():
    cfg = validate_config(ScenarioConfig())
    dep = build_hex_layout(cfg, np.random.default_rng(7))
    for c, cell in enumerate(dep.cells):
        ues = dep.ues[dep.ue_cell == c]
        site = dep.sites[cell.site_index]
        assert in_sector_wedge(ues, site, cell.azimuth_deg, cfg.isd_m, cfg.min_ue_distance_m).all()
        dist = np.hypot(*(ues[:, :2] - site).T)
        assert dist.min() >= cfg.min_ue_distance_m
        assert dist.max() <= cfg.isd_m / math.sqrt(3.0) + 1e-9
    assert_allclose(dep.ues[:, 2], cfg.h_ue_m)


def test_tilt_examples():
    assert_allclose(compute_tilt(500, 8000), math.degrees(math.atan(500 / 24000)), rtol=1e-12)
    assert compute_tilt(500, 8000) == pytest.approx(1.1934, abs=1e-3)
    assert compute_tilt(500, 1000) == pytest.approx(9.462, abs=1e-3)
    assert compute_tilt(0, 8000) == 0.0


def test_tilt_rejects_non_positive_altitude():
    with pytest.raises(DomainError):
        compute_tilt(500, 0)


def test_elevation_at_boresight_ground_point():
    cfg = validate_config(ScenarioConfig())
    cell = build_cells(cfg, hex_site_positions(cfg.isd_m))[0]
    bx, by = cell.boresight_ground_xy
    geo = link_geometry(cell.tx_xyz, (bx, by, 1.5), cell.boresight, cell.azimuth_deg)
    assert_allclose(math.hypot(bx, by), 500 / 3)
    assert float(geo.elevation_deg) == pytest.approx(88.81, abs=0.01)
    assert float(geo.offboresight_deg) < 0.01


def test_offboresight_at_nadir_equals_tilt():
    cfg = validate_config(ScenarioConfig())
    cell = build_cells(cfg, hex_site_positions(cfg.isd_m))[0]
    geo = link_geometry(cell.tx_xyz, (0.0, 0.0, 1.5), cell.boresight, cell.azimuth_deg)
    assert_allclose(float(geo.offboresight_deg), compute_tilt(500, 8000), rtol=1e-9)


def test_three_four_five_triangle():
    geo = link_geometry((0.0, 0.0, 401.5), (300.0, 0.0, 1.5))
    assert_allclose(geo.d2d_m, 300.0)
    assert_allclose(geo.d3d_m, 500.0)


def test_coincident_points_are_degenerate():
    with pytest.raises(DegenerateLinkError):
        link_geometry((1.0, 2.0, 3.0), (1.0, 2.0, 3.0))


def test_terrestrial_panel_angles_on_boresight():
    cfg = validate_config(ScenarioConfig(deployment_kind=DeploymentKind.TN5G))
    cell = build_cells(cfg, hex_site_positions(cfg.isd_m))[0]
    d = (cfg.h_tn_m - cfg.h_ue_m) / math.tan(math.radians(cfg.tn_downtilt_deg))
    az = math.radians(cell.azimuth_deg)
    geo = link_geometry(cell.tx_xyz, (d * math.cos(az), d * math.sin(az), cfg.h_ue_m),
                        cell.boresight, cell.azimuth_deg)
    assert float(geo.theta_local_deg) == pytest.approx(90.0, abs=1e-6)
    assert float(geo.phi_local_deg) == pytest.approx(0.0, abs=1e-6)
    assert float(geo.offboresight_deg) == pytest.approx(0.0, abs=1e-5)


def test_deployment_geometry_shape():
    cfg = validate_config(ScenarioConfig(n_ue=57))
    dep = build_hex_layout(cfg, np.random.default_rng(0))
    geo = deployment_link_geometry(dep, dep.ues)
    assert geo.d3d_m.shape == (57, 57)
    assert np.all(geo.elevation_deg > 0)


def test_footprint_examples():
    hpbw = ReflectorAntenna(10).hpbw_deg
    assert hpbw == pytest.approx(2.948, abs=1e-3)
    assert footprint_radius(1000, hpbw) == pytest.approx(25.7, abs=0.05)
    assert_allclose(footprint_radius(4000, hpbw), 4 * footprint_radius(1000, hpbw), rtol=1e-12)
    assert footprint_radius(1000, 0.0) == 0.0


def test_footprint_table_grows_with_altitude():
    table = footprints([1000, 2000, 4000], {10.0: ReflectorAntenna(10).hpbw_deg})
    radii = [r for _, _, r in table]
    assert len(table) == 3
    assert radii == sorted(radii)


def _rotate(points, degrees):
    c, s = math.cos(math.radians(degrees)), math.sin(math.radians(degrees))
    return points @ np.array([[c, s], [-s, c]])


@pytest.mark.parametrize("degrees", [60.0, 120.0, 180.0, 300.0])
def test_site_grid_is_unchanged_by_hex_rotation(degrees):
    sites = hex_site_positions(500.0)
    rotated = _rotate(sites, degrees)
    gap = np.min(np.hypot(*(rotated[:, None, :] - sites[None, :, :]).transpose(2, 0, 1)), axis=1)
    assert_allclose(gap, 0.0, atol=1e-6)


def test_sector_boresights_repeat_every_120_degrees():
    cfg = validate_config(ScenarioConfig())
    points = np.array([c.boresight_ground_xy for c in build_cells(cfg, hex_site_positions(cfg.isd_m))])
    rotated = _rotate(points, 120.0)
    gap = np.min(np.hypot(*(rotated[:, None, :] - points[None, :, :]).transpose(2, 0, 1)), axis=1)
    assert_allclose(gap, 0.0, atol=1e-6)
    # 60° 会把中心站点的视轴点转到两个扇区之间
    centre = _rotate(points[:3], 60.0)
    assert np.all(np.min(np.hypot(*(centre[:, None, :] - points[None, :, :]).transpose(2, 0, 1)), axis=1) > 100.0)
