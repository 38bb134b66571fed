import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import j1

from skylink.scenario.config import BEAM_MODES, DeploymentKind

# (2·J1(x)/x)² 的半功率点与第一零点
HALF_POWER_X = 1.6163
FIRST_NULL_X = 3.8317
# 方向图相对峰值的下限，避免零点处出现 -inf
PATTERN_FLOOR_DB = -60.0
_FLOOR_LINEAR = 10.0 ** (PATTERN_FLOOR_DB / 10.0)

# 天线坐标系中的法线方向 (theta, phi)
BROADSIDE = (90.0, 0.0)


@dataclass(frozen=True)
class ReflectorAntenna:
    """
    圆口径反射面天线

    radius_wavelengths : 口径半径 r_λ（以波长计）
    efficiency : 口径效率 η ∈ (0, 1]

    峰值增益 10·log10(η·(2π·r_λ)²)，即 4πA/λ² 乘以效率；
    归一化方向图 |2·J1(ka·sinθ)/(ka·sinθ)|²，ka = 2π·r_λ。
    """
    radius_wavelengths: float
    efficiency: float = 1.0

    @property
    def ka(self):
        return 2.0 * math.pi * self.radius_wavelengths

    @property
    def peak_gain_dbi(self):
        return 10.0 * math.log10(self.efficiency * self.ka ** 2)

    @property
    def hpbw_deg(self):
        return 2.0 * math.degrees(math.asin(HALF_POWER_X / self.ka))

    @property
    def first_null_deg(self):
        return math.degrees(math.asin(FIRST_NULL_X / self.ka))

    def normalized_pattern(self, offboresight_deg):
        """归一化功率方向图（线性，峰值 1，下限 -60 dB）"""
        theta = np.radians(np.asarray(offboresight_deg, dtype=float))
        x = self.ka * np.sin(theta)
        small = np.abs(x) < 1e-9
        safe = np.where(small, 1.0, x)
        pattern = np.where(small, 1.0, (2.0 * j1(safe) / safe) ** 2)
        pattern = np.where(np.abs(theta) > math.pi / 2, 0.0, pattern)
        return np.maximum(pattern, _FLOOR_LINEAR)

    def gain(self, offboresight_deg):
        return self.peak_gain_dbi + 10.0 * np.log10(self.normalized_pattern(offboresight_deg))

    @classmethod
    def for_config(cls, cfg):
        return cls(cfg.aperture_radius_wavelengths, cfg.aperture_efficiency)


def reflector_gain(ant, offboresight_deg):
    """反射面天线在视轴夹角 offboresight_deg 处的增益（dBi）"""
    return ant.gain(offboresight_deg)


@dataclass(frozen=True)
class ElementPattern:
    """
    扇区天线单元方向图参数

    垂直、水平两个抛物线切面，半功率宽度 65°，旁瓣/背瓣下限 30 dB，峰值 8 dBi。
    """
    peak_dbi: float = 8.0
    theta_3db_deg: float = 65.0
    phi_3db_deg: float = 65.0
    sla_v_db: float = 30.0
    a_max_db: float = 30.0

    def attenuation(self, theta_deg, phi_deg):
        """相对峰值的衰减（dB，≤ 0）"""
        theta = np.asarray(theta_deg, dtype=float)
        phi = (np.asarray(phi_deg, dtype=float) + 180.0) % 360.0 - 180.0
        a_v = -np.minimum(12.0 * ((theta - 90.0) / self.theta_3db_deg) ** 2, self.sla_v_db)
        a_h = -np.minimum(12.0 * (phi / self.phi_3db_deg) ** 2, self.a_max_db)
        return -np.minimum(-(a_v + a_h), self.a_max_db)


def tn_element_gain(pattern, theta_deg, phi_deg):
    """
    扇区单元增益（dBi）

    参数
    ----------
    pattern : ElementPattern
    theta_deg : 天线坐标系天顶角（视轴为 90°）
    phi_deg : 天线坐标系方位角（视轴为 0°）
    """
    return pattern.peak_dbi + pattern.attenuation(theta_deg, phi_deg)


def array_factor(n, psi):
    """
    N 元均匀线阵的功率阵因子，峰值为 N

    |Σ exp(j·m·ψ)|² / N = sin²(Nψ/2) / (N·sin²(ψ/2))
    """
    psi = np.asarray(psi, dtype=float)
    if n == 1:
        return np.ones_like(psi)
    half = psi / 2.0
    den = np.sin(half) ** 2
    near_peak = den < 1e-12
    af = np.sin(n * half) ** 2 / (n * np.where(near_peak, 1.0, den))
    return np.where(near_peak, float(n), af)


@dataclass(frozen=True)
class SectorAntenna:
    """
    地面扇区天线

    rows / cols : 均匀平面阵的行数（垂直）与列数（水平），阵元间距半波长
    beam_mode : BEAM_MODES 之一
        "fixed"  无阵列赋形，单元（或面板）方向图即扇区波束（4G）
        "sector" 阵列形成一个指向法线方向的固定扇区波束，所有 UE 共用
        "ue"     每个调度 UE 使用一个指向它的波束
    panel_peak_dbi : 不为 None 时，用该峰值替代单元峰值，方向图包络不变（4G 面板等效增益）
    """
    element: ElementPattern = ElementPattern()
    rows: int = 1
    cols: int = 1
    beam_mode: str = "fixed"
    panel_peak_dbi: Optional[float] = None

    def __post_init__(self):
        if self.beam_mode not in BEAM_MODES:
            raise ValueError(f"未知的波束模式 {self.beam_mode!r}")

    @property
    def n_elements(self):
        return self.rows * self.cols

    @property
    def steered(self):
        return self.beam_mode == "ue"

    @property
    def max_gain_dbi(self):
        if self.panel_peak_dbi is not None:
            return self.panel_peak_dbi
        if self.beam_mode == "fixed":
            return self.element.peak_dbi
        return self.element.peak_dbi + 10.0 * math.log10(self.n_elements)

    def sector_gain(self, theta_deg, phi_deg):
        """
        不做 UE 专属赋形时的扇区增益（dBi）

        "fixed" 为单元（面板）增益；"sector" 再叠加指向法线方向的固定波束阵因子；
        "ue" 模式下只含单元增益，用于 RSRP，数据信道的阵因子在每 PRB 上另算。
        """
        peak = self.panel_peak_dbi if self.panel_peak_dbi is not None else self.element.peak_dbi
        gain = peak + self.element.attenuation(theta_deg, phi_deg)
        if self.beam_mode == "sector":
            gain = gain + 10.0 * np.log10(self.steering_gain(BROADSIDE, (theta_deg, phi_deg)))
        return gain

    def steering_gain(self, serving_direction, eval_direction):
        """
        指向 serving_direction 的波束在 eval_direction 上的功率阵因子（线性，峰值 N）

        方向均为天线坐标系下的 (theta_deg, phi_deg)，可为数组。
        """
        ts, ps = (np.radians(np.asarray(a, dtype=float)) for a in serving_direction)
        te, pe = (np.radians(np.asarray(a, dtype=float)) for a in eval_direction)
        psi_h = math.pi * (np.sin(te) * np.sin(pe) - np.sin(ts) * np.sin(ps))
        psi_v = math.pi * (np.cos(te) - np.cos(ts))
        af = array_factor(self.cols, psi_h) * array_factor(self.rows, psi_v)
        return np.maximum(af, self.n_elements * _FLOOR_LINEAR)

    @classmethod
    def for_config(cls, cfg):
        if cfg.kind is DeploymentKind.TN4G:
            return cls(panel_peak_dbi=cfg.tn4g_panel_gain_dbi)
        return cls(rows=cfg.tn_array_rows, cols=cfg.tn_array_cols, beam_mode=cfg.tn_beam_mode)


def tn_beam_gain(ant, serving_direction, eval_direction):
    """
    单波束赋形后的地面扇区增益（dBi）

    单元增益（在 eval_direction 处）加上指向 serving_direction 的阵因子；
    1×1 阵列时退化为单元增益。
    """
    theta_e, phi_e = eval_direction
    element = tn_element_gain(ant.element, theta_e, phi_e)
    return element + 10.0 * np.log10(ant.steering_gain(serving_direction, eval_direction))
