import math
from dataclasses import dataclass

from scipy.constants import c as SPEED_OF_LIGHT

from skylink.errors import RangeError
from skylink.scenario.config import DeploymentKind

THERMAL_NOISE_DBM_HZ = -174.0
SUBCARRIERS_PER_PRB = 12

# 子载波间隔：4G 15 kHz，5G 30 kHz
SUBCARRIER_SPACING_HZ = {
    DeploymentKind.TN4G: 15e3,
    DeploymentKind.TN5G: 30e3,
    DeploymentKind.NTN5G: 30e3,
}

# 标准信道带宽对应的 PRB 数（LTE 15 kHz / NR 30 kHz）
PRB_TABLE = {
    15e3: {1.4e6: 6, 3e6: 15, 5e6: 25, 10e6: 50, 15e6: 75, 20e6: 100},
    30e3: {10e6: 24, 20e6: 51, 40e6: 106, 50e6: 133, 80e6: 217, 100e6: 273},
}


@dataclass(frozen=True)
class RadioConstants:
    """
    由配置导出的无线常数

    n_prb : PRB 数 N^PRB
    prb_bandwidth_hz : 每个 PRB 的带宽 B^PRB
    noise_per_prb_dbm : 每个 PRB 上的噪声功率 σ_k²
    wavelength_m : 载波波长 λ
    prb_tx_power_dbm : 每个 PRB 上的发射功率（总功率在 PRB 间均分）
    n_layers : MIMO 层数 L，单流单波束，固定为 1
    """
    n_prb: int
    prb_bandwidth_hz: float
    noise_per_prb_dbm: float
    wavelength_m: float
    prb_tx_power_dbm: float
    n_layers: int = 1

    @property
    def noise_per_prb_mw(self):
        return 10.0 ** (self.noise_per_prb_dbm / 10.0)

    @property
    def prb_tx_power_mw(self):
        return 10.0 ** (self.prb_tx_power_dbm / 10.0)


def noise_power_dbm(bandwidth_hz, noise_figure_db):
    """热噪声 -174 dBm/Hz + 10·log10(B) + NF"""
    return THERMAL_NOISE_DBM_HZ + 10.0 * math.log10(bandwidth_hz) + noise_figure_db


def prb_count(bandwidth_hz, subcarrier_spacing_hz):
    """
    带宽内的 PRB 数：标准带宽查表，其它带宽按 90% 占用率向下取整

    异常
    ----------
    RangeError : 带宽容纳不下一个 PRB
    """
    prb_bw = SUBCARRIERS_PER_PRB * subcarrier_spacing_hz
    table = PRB_TABLE.get(subcarrier_spacing_hz, {})
    for bw, n in table.items():
        if math.isclose(bw, bandwidth_hz):
            return n
    # 非标准带宽：按 90% 占用率取整
    n_prb = int(0.9 * bandwidth_hz // prb_bw)
    if n_prb < 1:
        raise RangeError("bandwidth_hz", bandwidth_hz,
                         f"带宽 {bandwidth_hz} Hz 容纳不下一个 {prb_bw / 1e3:g} kHz 的 PRB")
    return n_prb


def derive_radio_constants(cfg):
    """
    由已校验配置导出 PRB 网格、噪声与波长

    参数
    ----------
    cfg : ValidatedConfig

    返回
    ----------
    RadioConstants
    """
    scs = SUBCARRIER_SPACING_HZ[cfg.kind]
    prb_bw = SUBCARRIERS_PER_PRB * scs
    n_prb = prb_count(cfg.bandwidth_hz, scs)
    return RadioConstants(
        n_prb=n_prb,
        prb_bandwidth_hz=prb_bw,
        noise_per_prb_dbm=noise_power_dbm(prb_bw, cfg.ue_noise_figure_db),
        wavelength_m=SPEED_OF_LIGHT / cfg.carrier_hz,
        prb_tx_power_dbm=cfg.tx_power_dbm - 10.0 * math.log10(n_prb),
    )
