"""
视距（LoS）概率模型

- 地面 UMa：按站点水平距离的经典指数模型；
- NTN，平台高度 ≥ 8 km：密集城区按仰角查表；
- NTN，平台高度 < 8 km：基于街道/路口几何的统计模型。城区抽象为宽 W 的方形建筑、
  街宽 S 的曼哈顿网格，建筑高度服从 Rayleigh 分布。UE 分别位于两类街道区域
  （R1、R2）与路口区域（R3），对 UE 在区域内的位置与射线方位角取平均，得到
  P^R1、P^R2、P^R3，再按面积加权：

      PLoS = (S·W/A)·(P^R1 + P^R2) + (S²/A)·P^R3,   A = 2SW + S²
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from skylink.errors import DomainError

# 平台高度低于该值时使用几何模型
GEOMETRIC_MODEL_MAX_ALTITUDE_M = 8000.0

# 密集城区 LoS 概率，仰角 10°..90°
NTN_DENSE_URBAN_ELEVATIONS = np.arange(10.0, 91.0, 10.0)
NTN_DENSE_URBAN_PLOS = np.array([0.282, 0.331, 0.398, 0.468, 0.537, 0.612, 0.738, 0.820, 0.981])

_ELEVATION_GRID = np.arange(0.0, 90.0 + 1e-9, 0.5)
_POSITIONS_PER_AXIS = 12
_N_AZIMUTHS = 72
_RAY_STEP_M = 0.5
_RAY_RANGE_M = 800.0
_MAX_ENTRIES = 32


@dataclass(frozen=True)
class LosGeometryParams:
    """
    几何 LoS 模型参数

    building_w_m : 典型建筑尺寸 W
    street_s_m : 街道宽度 S
    height_scale_m : 建筑高度 Rayleigh 分布的尺度参数
    h_ue_m : UE 高度
    """
    building_w_m: float = 40.8
    street_s_m: float = 16.9
    height_scale_m: float = 20.0
    h_ue_m: float = 1.5

    @property
    def area(self):
        return 2.0 * self.street_s_m * self.building_w_m + self.street_s_m ** 2

    @property
    def street_weight(self):
        return self.street_s_m * self.building_w_m / self.area

    @property
    def crossroad_weight(self):
        return self.street_s_m ** 2 / self.area

    @classmethod
    def for_config(cls, cfg):
        return cls(cfg.building_w_m, cfg.street_s_m, cfg.building_height_scale_m, cfg.h_ue_m)


def uma_los_probability(d2d_m, h_ue_m=1.5):
    """地面 UMa 的 LoS 概率（室外 UE）"""
    d = np.maximum(np.asarray(d2d_m, dtype=float), 1e-9)
    if h_ue_m <= 13.0:
        c_h = 0.0
    else:
        c_h = ((h_ue_m - 13.0) / 10.0) ** 1.5
    p = (18.0 / d + np.exp(-d / 63.0) * (1.0 - 18.0 / d)) * \
        (1.0 + c_h * 1.25 * (d / 100.0) ** 3 * np.exp(-d / 150.0))
    return np.where(d <= 18.0, 1.0, np.clip(p, 0.0, 1.0))


def ntn_table_los_probability(elevation_deg):
    """密集城区仰角查表（线性插值，10° 以下取 10° 值）"""
    return np.interp(elevation_deg, NTN_DENSE_URBAN_ELEVATIONS, NTN_DENSE_URBAN_PLOS)


def _region_rays(params):
    """三个区域内的 UE 采样位置（周期网格中的坐标）"""
    w, s = params.building_w_m, params.street_s_m
    along = (np.arange(_POSITIONS_PER_AXIS) + 0.5) / _POSITIONS_PER_AXIS
    street_along = w * along
    street_across = w + s * along
    regions = {
        "R1": (street_along, street_across),
        "R2": (street_across, street_along),
        "R3": (street_across, street_across),
    }
    return {name: np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)
            for name, (xs, ys) in regions.items()}


def _building_entries(origins, params):
    """
    沿各方位角射线，记录依次进入的建筑的水平距离

    返回 (n_origins * n_azimuths, _MAX_ENTRIES) 数组，不足处填 inf。
    """
    w = params.building_w_m
    pitch = w + params.street_s_m
    steps = np.arange(1, int(_RAY_RANGE_M / _RAY_STEP_M) + 1) * _RAY_STEP_M
    azimuths = (np.arange(_N_AZIMUTHS) + 0.5) * (2.0 * math.pi / _N_AZIMUTHS)
    rows = []
    for psi in azimuths:
        x = origins[:, 0:1] + steps[None, :] * math.cos(psi)
        y = origins[:, 1:2] + steps[None, :] * math.sin(psi)
        inside = (np.mod(x, pitch) < w) & (np.mod(y, pitch) < w)
        entering = inside.copy()
        entering[:, 1:] &= ~inside[:, :-1]
        dist = np.where(entering, steps[None, :], np.inf)
        dist.sort(axis=1)
        rows.append(dist[:, :_MAX_ENTRIES])
    return np.vstack(rows)


@lru_cache(maxsize=16)
def _geometric_tables(params):
    """在仰角网格上预计算 P^R1、P^R2、P^R3"""
    tables = {}
    tan_grid = np.tan(np.radians(_ELEVATION_GRID[:-1]))
    sigma2 = 2.0 * params.height_scale_m ** 2
    for name, origins in _region_rays(params).items():
        entries = _building_entries(origins, params)
        hit = np.isfinite(entries)
        reach = np.where(hit, entries, 0.0)
        probs = []
        for t in tan_grid:
            # 未遇到建筑的槽位不参与乘积；inf 不能直接乘 0° 仰角的 tan
            z = params.h_ue_m + reach * t
            clear = np.where(hit, -np.expm1(-np.square(z) / sigma2), 1.0)
            probs.append(np.prod(clear, axis=1).mean())
        probs.append(1.0)
        tables[name] = np.array(probs)
    return tables


class GeometricLosModel:
    """
    低空平台（< 8 km）的几何 LoS 概率模型

    使用示例：
    >>> model = GeometricLosModel(LosGeometryParams())
    >>> p = model.probability(np.array([30.0, 60.0, 90.0]))
    """

    def __init__(self, params):
        self.params = params
        self.tables = None

    def compute(self):
        self.tables = _geometric_tables(self.params)
        return self.tables

    def region_probabilities(self, elevation_deg):
        """返回 (P^R1, P^R2, P^R3)"""
        if self.tables is None:
            self.compute()
        return tuple(np.interp(elevation_deg, _ELEVATION_GRID, self.tables[k]) for k in ("R1", "R2", "R3"))

    def probability(self, elevation_deg):
        p1, p2, p3 = self.region_probabilities(elevation_deg)
        return self.params.street_weight * (p1 + p2) + self.params.crossroad_weight * p3


def los_probability(elevation_deg, h_tx_m, params, terrestrial=False):
    """
    LoS 概率

    参数
    ----------
    elevation_deg : float 或数组，UE 看向发射端的仰角，(0°, 90°]
    h_tx_m : 发射端高度
    params : LosGeometryParams
    terrestrial : True 时使用地面 UMa 模型（水平距离由仰角与高度差反算）

    异常
    ----------
    DomainError : 仰角 ≤ 0
    """
    elevation = np.asarray(elevation_deg, dtype=float)
    if np.any(elevation <= 0):
        raise DomainError("仰角必须大于 0°")
    if terrestrial:
        d2d = (h_tx_m - params.h_ue_m) / np.tan(np.radians(elevation))
        return uma_los_probability(d2d, params.h_ue_m)
    if h_tx_m < GEOMETRIC_MODEL_MAX_ALTITUDE_M:
        return GeometricLosModel(params).probability(elevation)
    return ntn_table_los_probability(elevation)
