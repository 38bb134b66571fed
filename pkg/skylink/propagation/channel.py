import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from skylink.errors import RangeError

UMA_MAX_D2D_M = 5000.0
UMA_SIGMA_LOS_DB = 4.0
UMA_SIGMA_NLOS_DB = 6.0

# 密集城区 S 频段：阴影标准差（LoS / NLoS）与杂波损耗，仰角 10°..90°
NTN_ELEVATIONS = np.arange(10.0, 91.0, 10.0)
NTN_SIGMA_LOS_DB = np.array([3.5, 3.4, 2.9, 3.0, 3.1, 2.7, 2.5, 2.3, 1.2])
NTN_SIGMA_NLOS_DB = np.array([15.5, 13.9, 12.4, 11.7, 10.6, 10.5, 10.1, 9.2, 9.2])
NTN_CLUTTER_DB = np.array([34.3, 30.9, 29.0, 27.7, 26.8, 26.2, 25.8, 25.5, 25.5])
# 密集城区 LoS 链路的 Rician K 因子均值（dB）
NTN_K_FACTOR_DB = np.array([4.4, 9.0, 9.3, 7.9, 7.4, 7.0, 6.9, 6.5, 6.8])


@dataclass(frozen=True)
class NtnPathlossBreakdown:
    """NTN 路径损耗的六个分量（dB，均 ≥ 0）"""
    fspl_db: np.ndarray
    clutter_db: np.ndarray
    gaseous_db: np.ndarray
    rain_db: np.ndarray
    cloud_db: np.ndarray
    scintillation_db: np.ndarray

    @property
    def total_db(self):
        return (self.fspl_db + self.clutter_db + self.gaseous_db + self.rain_db
                + self.cloud_db + self.scintillation_db)


@dataclass(frozen=True)
class LargeScaleState:
    """
    单条链路的大尺度状态

    pathloss_gain ρ（线性，≤ 1）、shadowing_gain τ、antenna_gain g；β = ρ·τ·g
    """
    los: np.ndarray
    pathloss_gain: np.ndarray
    shadowing_gain: np.ndarray
    antenna_gain: np.ndarray

    @property
    def beta(self):
        return self.pathloss_gain * self.shadowing_gain * self.antenna_gain

    @classmethod
    def from_db(cls, los, pathloss_db, shadowing_db, antenna_gain_dbi):
        return cls(
            los=np.asarray(los),
            pathloss_gain=10.0 ** (-np.asarray(pathloss_db, dtype=float) / 10.0),
            shadowing_gain=10.0 ** (np.asarray(shadowing_db, dtype=float) / 10.0),
            antenna_gain=10.0 ** (np.asarray(antenna_gain_dbi, dtype=float) / 10.0),
        )


@dataclass(frozen=True)
class FadingState:
    """每个 PRB 的小尺度复信道系数，最后一维为 PRB"""
    k_factor_linear: np.ndarray
    coefficients: np.ndarray

    @property
    def power(self):
        return np.abs(self.coefficients) ** 2


def fspl_db(d3d_m, f_hz):
    """自由空间路径损耗 20·log10(4π·d·f/c)"""
    return 20.0 * np.log10(4.0 * math.pi * np.asarray(d3d_m, dtype=float) * f_hz / SPEED_OF_LIGHT)


def tn_pathloss(link, los, f_hz, h_bs_m=25.0, h_ue_m=1.5):
    """
    地面 UMa 路径损耗（dB）

    LoS 为双斜率模型（断点 d'_BP = 4·h'_BS·h'_UT·f/c，有效环境高度 1 m），
    NLoS 取 max(LoS, NLoS')。

    异常
    ----------
    RangeError : 水平距离超过 5 km
    """
    d2d = np.asarray(link.d2d_m, dtype=float)
    d3d = np.asarray(link.d3d_m, dtype=float)
    if np.any(d2d > UMA_MAX_D2D_M):
        raise RangeError("d2d_m", float(np.max(d2d)), f"UMa 模型仅适用于 d2d ≤ {UMA_MAX_D2D_M} m")
    f_ghz = f_hz / 1e9
    d_bp = 4.0 * (h_bs_m - 1.0) * (h_ue_m - 1.0) * f_hz / SPEED_OF_LIGHT
    pl1 = 28.0 + 22.0 * np.log10(d3d) + 20.0 * math.log10(f_ghz)
    pl2 = (28.0 + 40.0 * np.log10(d3d) + 20.0 * math.log10(f_ghz)
           - 9.0 * math.log10(d_bp ** 2 + (h_bs_m - h_ue_m) ** 2))
    pl_los = np.where(d2d <= d_bp, pl1, pl2)
    pl_nlos = 13.54 + 39.08 * np.log10(d3d) + 20.0 * math.log10(f_ghz) - 0.6 * (h_ue_m - 1.5)
    return np.where(np.asarray(los, dtype=bool), pl_los, np.maximum(pl_los, pl_nlos))


def ntn_clutter_db(elevation_deg):
    return np.interp(elevation_deg, NTN_ELEVATIONS, NTN_CLUTTER_DB)


def ntn_pathloss(link, los, f_hz, cfg):
    """
    NTN 路径损耗分解

    fspl 按斜距计算；杂波损耗按仰角查表，仅作用于 NLoS；
    气体、雨、云与闪烁衰减取配置中的标量。
    """
    fspl = fspl_db(link.d3d_m, f_hz)
    los = np.asarray(los, dtype=bool)
    clutter = np.where(los, 0.0, ntn_clutter_db(link.elevation_deg))
    ones = np.ones_like(fspl)
    return NtnPathlossBreakdown(
        fspl_db=fspl,
        clutter_db=clutter,
        gaseous_db=cfg.gaseous_db * ones,
        rain_db=cfg.rain_db * ones,
        cloud_db=cfg.cloud_db * ones,
        scintillation_db=cfg.scintillation_db * ones,
    )


def shadowing_sigma_db(los, regime, elevation_deg=None):
    """按信道类型与 LoS 状态给出阴影标准差"""
    los = np.asarray(los, dtype=bool)
    if regime == "TN":
        return np.where(los, UMA_SIGMA_LOS_DB, UMA_SIGMA_NLOS_DB)
    elevation = np.broadcast_to(np.asarray(elevation_deg, dtype=float), los.shape)
    return np.where(los,
                    np.interp(elevation, NTN_ELEVATIONS, NTN_SIGMA_LOS_DB),
                    np.interp(elevation, NTN_ELEVATIONS, NTN_SIGMA_NLOS_DB))


def shadowing_sample(rng, los, regime, elevation_deg=None, sigma_override_db=None):
    """
    零均值对数正态阴影（dB）

    参数
    ----------
    rng : numpy.random.Generator，本链路（或本批链路）的随机流
    los : bool 或 bool 数组
    regime : "TN" 或 "NTN"
    elevation_deg : NTN 查表所需的仰角
    sigma_override_db : 不为 None 时强制使用该标准差
    """
    los = np.asarray(los, dtype=bool)
    if sigma_override_db is not None:
        sigma = np.full(los.shape, float(sigma_override_db))
    else:
        sigma = shadowing_sigma_db(los, regime, elevation_deg)
    return sigma * rng.standard_normal(los.shape)


def ntn_k_factor_db(elevation_deg):
    return np.interp(elevation_deg, NTN_ELEVATIONS, NTN_K_FACTOR_DB)


def _rician_weights(k_factor_linear):
    k = np.asarray(k_factor_linear, dtype=float)
    finite = np.isfinite(k)
    k_safe = np.where(finite, k, 0.0)
    w_los = np.where(finite, k_safe / (1.0 + k_safe), 1.0)
    return np.sqrt(w_los), np.sqrt(1.0 - w_los)


def rician_fade(rng, k_factor_linear, n_prb, los_phase_rad=0.0):
    """
    每 PRB 的 Rician 衰落系数

    h_k = √(K/(1+K))·h_LOS + √(1/(1+K))·h_NLOS，h_LOS 为单位模的平面波相量，
    h_NLOS 为各 PRB 独立的单位功率复高斯。K = 0 时退化为 Rayleigh，K = inf 时 |h_k| = 1。

    返回
    ----------
    FadingState，coefficients 形状为 K 的形状 + (n_prb,)
    """
    k = np.asarray(k_factor_linear, dtype=float)
    w_los, w_nlos = _rician_weights(k)
    shape = k.shape + (n_prb,)
    nlos = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
    h_los = np.exp(1j * np.asarray(los_phase_rad, dtype=float))[..., None]
    coeffs = w_los[..., None] * h_los + w_nlos[..., None] * nlos
    return FadingState(k_factor_linear=k, coefficients=coeffs)


def los_phase(d3d_m, wavelength_m):
    """平面波近似下 LoS 分量的相位 -2π·d/λ"""
    return -2.0 * math.pi * np.mod(np.asarray(d3d_m, dtype=float) / wavelength_m, 1.0)


def compose_large_scale(pathloss_db, shadowing_db, antenna_gain_dbi):
    """大尺度增益 β = 10^((-PL + SF + G)/10)"""
    return 10.0 ** ((-np.asarray(pathloss_db, dtype=float) + shadowing_db + antenna_gain_dbi) / 10.0)
