from dataclasses import dataclass
from typing import List

import numpy as np


@dataclass(frozen=True)
class AssociationMap:
    """
    UE 与小区的关联结果

    serving_cell : (N_UE,) 每个 UE 的服务小区 ĉ_u
    rsrp_dbm : (N_UE, N_cells) RSRP 矩阵
    served : 每个小区服务的 UE 下标集合 U_c
    load : (N_cells,) 每个小区的 UE 数 N^UE_c
    """
    serving_cell: np.ndarray
    rsrp_dbm: np.ndarray
    served: List[np.ndarray]
    load: np.ndarray


def compute_rsrp(large_scale, prb_tx_power_dbm):
    """
    RSRP = 每 PRB 发射功率 + β（dB），仅含大尺度项，不含快衰落

    参数
    ----------
    large_scale : LargeScaleState
    prb_tx_power_dbm : float
    """
    return prb_tx_power_dbm + 10.0 * np.log10(large_scale.beta)


def associate(rsrp_dbm):
    """
    每个 UE 选择 RSRP 最大的小区，并列时取编号最小者（np.argmax 返回首个最大值）
    """
    rsrp = np.asarray(rsrp_dbm, dtype=float)
    serving = np.argmax(rsrp, axis=1)
    n_cells = rsrp.shape[1]
    served = [np.flatnonzero(serving == c) for c in range(n_cells)]
    load = np.bincount(serving, minlength=n_cells)
    return AssociationMap(serving_cell=serving, rsrp_dbm=rsrp, served=served, load=load)
