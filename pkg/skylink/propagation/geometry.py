import math
from dataclasses import dataclass
from typing import List

import numpy as np

from skylink.errors import DomainError, DegenerateLinkError
from skylink.scenario.config import N_SECTORS

SECTOR_AZIMUTHS_DEG = (30.0, 150.0, 270.0)
# 第一圈邻站方向（与扇区方位角交错的 30° + k·60°）
_NEIGHBOUR_AXES_DEG = (30.0, 90.0)


@dataclass(frozen=True)
class CellGeometry:
    """
    单个扇区小区的几何描述

    site_index : 所属站点编号
    azimuth_deg : 波束方位角（30 / 150 / 270）
    tilt_deg : NTN 为反射面偏离垂直方向的倾角 α；TN 为机械下倾角
    boresight_ground_xy : 视轴与地面的交点（TN 为扇区中心，即距站点 ISD/3 处）
    tx_xyz : 发射端三维位置（TN 为天线挂高，NTN 为平台高度）
    boresight : 视轴单位向量（全局坐标，z 轴向上）
    """
    site_index: int
    azimuth_deg: float
    tilt_deg: float
    boresight_ground_xy: tuple
    tx_xyz: tuple
    boresight: tuple
    is_ntn: bool

    @property
    def tilt_from_vertical_deg(self):
        return self.tilt_deg if self.is_ntn else 90.0 - self.tilt_deg

    @property
    def mechanical_downtilt_deg(self):
        return 90.0 - self.tilt_deg if self.is_ntn else self.tilt_deg


@dataclass(frozen=True)
class Deployment:
    """
    一次投放的完整部署：19 个站点、57 个小区、N_UE 个 UE

    ues 为 (N_UE, 3) 数组；ue_cell 记录每个 UE 投放时所在的扇区区域，
    与最终服务小区（由 RSRP 决定）不一定相同。
    """
    sites: np.ndarray
    cells: List[CellGeometry]
    ues: np.ndarray
    ue_cell: np.ndarray
    isd_m: float

    @property
    def n_cells(self):
        return len(self.cells)

    @property
    def tx_positions(self):
        return np.array([c.tx_xyz for c in self.cells], dtype=float)

    @property
    def boresights(self):
        return np.array([c.boresight for c in self.cells], dtype=float)

    @property
    def azimuths_deg(self):
        return np.array([c.azimuth_deg for c in self.cells], dtype=float)

    @property
    def boresight_points(self):
        return np.array([c.boresight_ground_xy for c in self.cells], dtype=float)


@dataclass(frozen=True)
class LinkGeometry:
    """
    发射端到 UE 的链路几何（各字段可为标量或同形状数组）

    elevation_deg 为 UE 水平面到发射端的仰角 θ；offboresight_deg 为视轴与
    UE 方向的夹角；theta_local_deg / phi_local_deg 为天线面板坐标系中的
    天顶角与方位角（视轴方向对应 90° / 0°）。
    """
    d2d_m: np.ndarray
    d3d_m: np.ndarray
    elevation_deg: np.ndarray
    offboresight_deg: np.ndarray
    theta_local_deg: np.ndarray
    phi_local_deg: np.ndarray


def hex_site_positions(isd_m, rings=2):
    """以原点为中心的六边形站点网格，两圈时共 19 个站点"""
    a1 = np.array([math.cos(math.radians(_NEIGHBOUR_AXES_DEG[0])),
                   math.sin(math.radians(_NEIGHBOUR_AXES_DEG[0]))])
    a2 = np.array([math.cos(math.radians(_NEIGHBOUR_AXES_DEG[1])),
                   math.sin(math.radians(_NEIGHBOUR_AXES_DEG[1]))])
    sites = []
    for ring in range(rings + 1):
        for q in range(-ring, ring + 1):
            for r in range(-ring, ring + 1):
                s = -q - r
                if max(abs(q), abs(r), abs(s)) == ring:
                    sites.append(isd_m * (q * a1 + r * a2))
    # 按 (圈号, 方位角) 排序，保证编号稳定
    sites = np.array(sites)
    radius = np.round(np.hypot(sites[:, 0], sites[:, 1]), 6)
    angle = np.round(np.mod(np.degrees(np.arctan2(sites[:, 1], sites[:, 0])), 360.0), 6)
    order = np.lexsort((angle, radius))
    return sites[order]


def compute_tilt(isd_m, h_ntn_m):
    """
    反射面视轴偏离天底方向的倾角 α = arctan(ISD / (3·h_NTN))，单位度

    视轴与地面交点距站点天底 NF = ISD/3，即扇区覆盖区中心。
    """
    if h_ntn_m <= 0:
        raise DomainError(f"平台高度必须为正，收到 h_ntn_m={h_ntn_m}")
    if isd_m < 0:
        raise DomainError(f"站间距不能为负，收到 isd_m={isd_m}")
    return math.degrees(math.atan(isd_m / (3.0 * h_ntn_m)))


def footprint_radius(h_ntn_m, hpbw_deg):
    """近天底波束的半功率覆盖半径 h·tan(HPBW/2)"""
    return h_ntn_m * math.tan(math.radians(hpbw_deg) / 2.0)


def footprints(altitudes_m, hpbw_by_aperture):
    """
    覆盖半径表

    参数
    ----------
    altitudes_m : iterable of float
    hpbw_by_aperture : dict，{反射面半径(波长): HPBW(度)}

    返回
    ----------
    list of (aperture_wl, altitude_m, radius_m)
    """
    return [(ap, h, footprint_radius(h, hpbw))
            for ap, hpbw in hpbw_by_aperture.items() for h in altitudes_m]


def _unit(azimuth_deg, depression_deg):
    az = math.radians(azimuth_deg)
    dep = math.radians(depression_deg)
    return (math.cos(dep) * math.cos(az), math.cos(dep) * math.sin(az), -math.sin(dep))


def build_cells(cfg, sites):
    cells = []
    nf = cfg.isd_m / 3.0
    for i, (sx, sy) in enumerate(sites):
        for az in SECTOR_AZIMUTHS_DEG:
            ground = (sx + nf * math.cos(math.radians(az)), sy + nf * math.sin(math.radians(az)))
            if cfg.kind.is_ntn:
                alpha = compute_tilt(cfg.isd_m, cfg.h_ntn_m)
                cells.append(CellGeometry(i, az, alpha, ground, (sx, sy, cfg.h_ntn_m),
                                          _unit(az, 90.0 - alpha), True))
            else:
                tilt = cfg.tn_downtilt_deg
                cells.append(CellGeometry(i, az, tilt, ground, (sx, sy, cfg.h_tn_m),
                                          _unit(az, tilt), False))
    return cells


def in_sector_wedge(points, site_xy, azimuth_deg, isd_m, min_distance_m=0.0):
    """
    判断点是否落在站点六边形小区中朝向 azimuth 的 120° 楔形内

    站点小区为平顶六边形（边心距 ISD/2），三个楔形恰好划分该六边形。
    """
    rel = np.atleast_2d(points)[:, :2] - np.asarray(site_xy)
    angle = np.degrees(np.arctan2(rel[:, 1], rel[:, 0]))
    diff = np.abs((angle - azimuth_deg + 180.0) % 360.0 - 180.0)
    inside = diff <= 60.0
    for k in range(6):
        n = math.radians(30.0 + 60.0 * k)
        inside &= rel[:, 0] * math.cos(n) + rel[:, 1] * math.sin(n) <= isd_m / 2.0
    inside &= np.hypot(rel[:, 0], rel[:, 1]) >= min_distance_m
    return inside


def drop_ues(cfg, sites, rng):
    """每个扇区楔形内均匀投放 n_ue/57 个 UE（拒绝采样）"""
    n_cells = len(sites) * N_SECTORS
    per_cell = cfg.n_ue // n_cells
    half = cfg.isd_m / math.sqrt(3.0)
    ues, owner = [], []
    for cell in range(n_cells):
        site = sites[cell // N_SECTORS]
        az = SECTOR_AZIMUTHS_DEG[cell % N_SECTORS]
        accepted = np.empty((0, 2))
        while len(accepted) < per_cell:
            cand = site + rng.uniform(-half, half, size=(4 * per_cell, 2))
            ok = in_sector_wedge(cand, site, az, cfg.isd_m, cfg.min_ue_distance_m)
            accepted = np.vstack([accepted, cand[ok]])
        ues.append(accepted[:per_cell])
        owner.extend([cell] * per_cell)
    xy = np.vstack(ues)
    xyz = np.column_stack([xy, np.full(len(xy), cfg.h_ue_m)])
    return xyz, np.array(owner, dtype=int)


def build_hex_layout(cfg, rng=None):
    """
    构建 19 站点 / 57 小区的六边形部署并投放 UE

    参数
    ----------
    cfg : ValidatedConfig
    rng : numpy.random.Generator，可选
        UE 投放所用随机流；默认由 cfg.rng_seed 生成

    返回
    ----------
    Deployment
    """
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    sites = hex_site_positions(cfg.isd_m)
    cells = build_cells(cfg, sites)
    ues, owner = drop_ues(cfg, sites, rng)
    return Deployment(sites=sites, cells=cells, ues=ues, ue_cell=owner, isd_m=cfg.isd_m)


def panel_axes(boresight, azimuth_deg):
    """
    由视轴与方位角构造天线坐标系 (x', y', z')

    x' 为视轴，y' 为水平且垂直于方位面的轴，z' = x' × y'。
    """
    x = np.asarray(boresight, dtype=float)
    az = np.radians(np.asarray(azimuth_deg, dtype=float))
    y = np.stack([-np.sin(az), np.cos(az), np.zeros_like(az)], axis=-1)
    z = np.cross(x, y)
    return x, y, z


def link_geometry(tx_xyz, ue_xyz, boresight=(0.0, 0.0, -1.0), azimuth_deg=0.0):
    """
    计算发射端到 UE 的距离、仰角与视轴夹角（支持广播）

    参数
    ----------
    tx_xyz : array-like (..., 3)
    ue_xyz : array-like (..., 3)
    boresight : array-like (..., 3)，发射天线视轴单位向量
    azimuth_deg : 视轴方位角，用于确定天线坐标系的水平轴

    返回
    ----------
    LinkGeometry

    异常
    ----------
    DegenerateLinkError : 发射端与 UE 重合
    """
    tx = np.asarray(tx_xyz, dtype=float)
    ue = np.asarray(ue_xyz, dtype=float)
    delta = ue - tx
    d2d = np.hypot(delta[..., 0], delta[..., 1])
    dh = tx[..., 2] - ue[..., 2]
    d3d = np.sqrt(d2d ** 2 + dh ** 2)
    if np.any(d3d == 0):
        raise DegenerateLinkError("发射端与 UE 位置重合")
    elevation = np.degrees(np.arctan2(dh, d2d))

    direction = delta / d3d[..., None]
    x, y, z = panel_axes(boresight, azimuth_deg)
    cos_off = np.clip(np.sum(direction * x, axis=-1), -1.0, 1.0)
    cos_theta = np.clip(np.sum(direction * z, axis=-1), -1.0, 1.0)
    phi = np.degrees(np.arctan2(np.sum(direction * y, axis=-1), np.sum(direction * x, axis=-1)))
    return LinkGeometry(
        d2d_m=d2d,
        d3d_m=d3d,
        elevation_deg=elevation,
        offboresight_deg=np.degrees(np.arccos(cos_off)),
        theta_local_deg=np.degrees(np.arccos(cos_theta)),
        phi_local_deg=phi,
    )


def deployment_link_geometry(deployment, points_xyz):
    """所有接收点 × 所有小区的链路几何，数组形状 (N_points, N_cells)"""
    pts = np.asarray(points_xyz, dtype=float)[:, None, :]
    return link_geometry(deployment.tx_positions[None, :, :], pts,
                         deployment.boresights[None, :, :], deployment.azimuths_deg[None, :])
