from dataclasses import dataclass

import numpy as np

from skylink.errors import ConsistencyError


@dataclass(frozen=True)
class UeResult:
    """
    一批 UE 的链路结果（按列存放，第一维为 UE）

    prb_sinr : (N_UE, N_PRB) 每 PRB SINR γ_{u,k}（线性）
    eff_sinr : (N_UE,) 有效 SINR γ̃_u（线性）
    rate_bps : (N_UE,) 可达速率 R_u
    spectral_efficiency : (N_UE,) R_u / B_0
    """
    serving_cell: np.ndarray
    prb_sinr: np.ndarray
    eff_sinr: np.ndarray
    rate_bps: np.ndarray
    spectral_efficiency: np.ndarray

    @property
    def eff_sinr_db(self):
        return 10.0 * np.log10(self.eff_sinr)

    def __len__(self):
        return len(self.eff_sinr)


def ue_rate(eff_sinr, serving, load, radio):
    """
    轮询调度 + 满缓冲下的可达速率，L = 1

    R_u = (N^PRB·B^PRB / N^UE_{ĉ_u})·log2(1 + γ̃_u)
    """
    serving = np.asarray(serving)
    served_count = np.asarray(load)[serving]
    if np.any(served_count <= 0):
        raise ConsistencyError("服务小区的 UE 数为 0，与关联结果矛盾")
    share = radio.n_prb * radio.prb_bandwidth_hz / served_count
    return radio.n_layers * share * np.log2(1.0 + np.asarray(eff_sinr, dtype=float))


def spectral_efficiency(rate_bps, bandwidth_hz):
    """按系统带宽归一化的吞吐量（bps/Hz）"""
    return np.asarray(rate_bps, dtype=float) / bandwidth_hz
