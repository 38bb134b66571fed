import math
from dataclasses import dataclass, asdict, fields, replace
from enum import Enum
from typing import Optional

from scipy.constants import c as SPEED_OF_LIGHT

from skylink.errors import RangeError, ConsistencyError

N_SITES = 19
N_SECTORS = 3
N_CELLS = N_SITES * N_SECTORS

# 表 1 中 NTN 设计空间的范围
APERTURE_RANGE_WL = (5.0, 50.0)
H_NTN_RANGE_M = (1000.0, 20000.0)

LOS_MODES = ("draw", "expectation")
BEAM_MODES = ("fixed", "sector", "ue")


class DeploymentKind(str, Enum):
    """三种部署形态"""
    TN4G = "TN4G"
    TN5G = "TN5G"
    NTN5G = "NTN5G"

    @property
    def is_ntn(self):
        return self is DeploymentKind.NTN5G


# 各部署形态的默认载频 / 带宽 / 每小区发射功率 / 干扰小区的 PRB 占用率
KIND_DEFAULTS = {
    DeploymentKind.TN4G: {"carrier_hz": 2.0e9, "bandwidth_hz": 20e6, "tx_power_dbm": 46.0,
                          "interferer_activity": 0.45},
    DeploymentKind.TN5G: {"carrier_hz": 3.5e9, "bandwidth_hz": 100e6, "tx_power_dbm": 49.0,
                          "interferer_activity": 0.75},
    DeploymentKind.NTN5G: {"carrier_hz": 3.5e9, "bandwidth_hz": 100e6, "tx_power_dbm": 43.0,
                           "interferer_activity": 1.0},
}


@dataclass(frozen=True)
class ScenarioConfig:
    """
    场景配置（未校验）

    字段名即配置文件中的键名。carrier_hz / bandwidth_hz / tx_power_dbm / interferer_activity
    为 None 时，由 validate_config 按 deployment_kind 填入默认值。

    interferer_activity 为每个干扰小区在任一 PRB 上发射的概率（部分负载），
    服务小区始终在其 UE 的 PRB 上发射。
    tn_beam_mode 只对 TN5G 生效，取值见 BEAM_MODES；默认 "sector" 为 8×1 列阵
    形成的单个固定扇区波束，"ue" 为每个调度 UE 一个波束。

    shadowing_sigma_db 为 None 表示使用信道模型自带的阴影标准差；给定数值则
    对所有链路强制使用该值（0 表示关闭阴影）。
    """
    deployment_kind: DeploymentKind = DeploymentKind.NTN5G
    carrier_hz: Optional[float] = None
    bandwidth_hz: Optional[float] = None
    isd_m: float = 500.0
    h_tn_m: float = 25.0
    h_ntn_m: float = 8000.0
    h_ue_m: float = 1.5
    n_ue: int = 570
    aperture_radius_wavelengths: float = 25.0
    building_w_m: float = 40.8
    street_s_m: float = 16.9
    tx_power_dbm: Optional[float] = None
    ue_noise_figure_db: float = 7.0
    aperture_efficiency: float = 1.0
    n_drops: int = 20
    rng_seed: int = 0
    # 以下为扩展参数
    tn_downtilt_deg: float = 12.0
    tn_array_rows: int = 8
    tn_array_cols: int = 1
    tn_beam_mode: str = "sector"
    interferer_activity: Optional[float] = None
    tn4g_panel_gain_dbi: float = 17.0
    tn_k_factor_db: float = 9.0
    building_height_scale_m: float = 20.0
    los_mode: str = "draw"
    gaseous_db: float = 0.1
    rain_db: float = 0.0
    cloud_db: float = 0.0
    scintillation_db: float = 0.0
    shadowing_sigma_db: Optional[float] = None
    min_ue_distance_m: float = 35.0
    heatmap_max_pixels: int = 250_000

    @property
    def kind(self):
        return DeploymentKind(self.deployment_kind)

    def to_dict(self):
        data = asdict(self)
        data["deployment_kind"] = DeploymentKind(self.deployment_kind).value
        return data


@dataclass(frozen=True)
class ValidatedConfig(ScenarioConfig):
    """通过 validate_config 的配置；构造后不可变，可在并行 worker 间只读共享"""

    @property
    def aperture_radius_m(self):
        return self.aperture_radius_wavelengths * SPEED_OF_LIGHT / self.carrier_hz


def field_names():
    return [f.name for f in fields(ScenarioConfig)]


def _require_positive(cfg, *names):
    for name in names:
        value = getattr(cfg, name)
        if value is None or not math.isfinite(value) or value <= 0:
            raise RangeError(name, value)


def _require_range(name, value, lo, hi):
    if not (lo <= value <= hi):
        raise RangeError(name, value, f"参数 {name}={value!r} 不在 [{lo}, {hi}] 内")


def _require_prb_grid(cfg):
    # 带宽至少容纳一个 PRB，保证 N^PRB·B^PRB ≤ bandwidth_hz
    from skylink.scenario.radio import prb_count, SUBCARRIER_SPACING_HZ
    prb_count(cfg.bandwidth_hz, SUBCARRIER_SPACING_HZ[cfg.kind])


def validate_config(cfg):
    """
    校验配置并填入按部署形态决定的默认值

    参数
    ----------
    cfg : ScenarioConfig
        原始配置（来自文件或 CLI）

    返回
    ----------
    ValidatedConfig

    异常
    ----------
    RangeError : 某个字段超出范围（err.field 为字段名），包括带宽不足一个 PRB
    ConsistencyError : n_ue 不能被 57 整除，或字段之间矛盾
    """
    try:
        kind = DeploymentKind(cfg.deployment_kind)
    except ValueError:
        raise RangeError("deployment_kind", cfg.deployment_kind) from None

    filled = {"deployment_kind": kind}
    for name, default in KIND_DEFAULTS[kind].items():
        if getattr(cfg, name) is None:
            filled[name] = default
    cfg = replace(cfg, **filled)

    _require_positive(cfg, "carrier_hz", "bandwidth_hz", "isd_m", "h_tn_m", "h_ntn_m",
                      "h_ue_m", "building_w_m", "street_s_m", "building_height_scale_m")
    for name in ("n_ue", "n_drops", "tn_array_rows", "tn_array_cols", "heatmap_max_pixels"):
        value = getattr(cfg, name)
        if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
            raise RangeError(name, value)
    if not math.isfinite(cfg.tx_power_dbm):
        raise RangeError("tx_power_dbm", cfg.tx_power_dbm)
    if not (0.0 < cfg.aperture_efficiency <= 1.0):
        raise RangeError("aperture_efficiency", cfg.aperture_efficiency)
    if cfg.ue_noise_figure_db < 0:
        raise RangeError("ue_noise_figure_db", cfg.ue_noise_figure_db)
    if isinstance(cfg.rng_seed, bool) or not isinstance(cfg.rng_seed, int) or not (0 <= cfg.rng_seed < 2 ** 64):
        raise RangeError("rng_seed", cfg.rng_seed)
    if cfg.los_mode not in LOS_MODES:
        raise RangeError("los_mode", cfg.los_mode)
    for name in ("gaseous_db", "rain_db", "cloud_db", "scintillation_db", "min_ue_distance_m"):
        if getattr(cfg, name) < 0:
            raise RangeError(name, getattr(cfg, name))
    if cfg.shadowing_sigma_db is not None and cfg.shadowing_sigma_db < 0:
        raise RangeError("shadowing_sigma_db", cfg.shadowing_sigma_db)
    _require_range("tn_downtilt_deg", cfg.tn_downtilt_deg, 0.0, 90.0)
    if cfg.tn_beam_mode not in BEAM_MODES:
        raise RangeError("tn_beam_mode", cfg.tn_beam_mode)
    if not (0.0 < cfg.interferer_activity <= 1.0):
        raise RangeError("interferer_activity", cfg.interferer_activity)
    _require_prb_grid(cfg)

    if kind.is_ntn:
        _require_range("aperture_radius_wavelengths", cfg.aperture_radius_wavelengths, *APERTURE_RANGE_WL)
        _require_range("h_ntn_m", cfg.h_ntn_m, *H_NTN_RANGE_M)
    elif cfg.h_ue_m >= cfg.h_tn_m:
        raise ConsistencyError(f"UE 高度 {cfg.h_ue_m} m 不低于基站高度 {cfg.h_tn_m} m")

    if cfg.n_ue % N_CELLS != 0:
        raise ConsistencyError(f"n_ue={cfg.n_ue} 不能被小区数 {N_CELLS} 整除，无法均匀分配负载")
    if cfg.min_ue_distance_m >= cfg.isd_m / 3:
        raise ConsistencyError("min_ue_distance_m 必须小于 ISD/3，否则扇区内无可投放区域")

    return ValidatedConfig(**{f.name: getattr(cfg, f.name) for f in fields(ScenarioConfig)})


def with_design_point(cfg, h_ntn_m, aperture_wl):
    """返回替换了平台高度与反射面半径的新配置（已校验）"""
    return validate_config(replace(cfg, h_ntn_m=float(h_ntn_m), aperture_radius_wavelengths=float(aperture_wl)))
