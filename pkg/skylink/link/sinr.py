import numpy as np

from skylink.errors import ConsistencyError, EmptyInputError


def _check_serving(serving, beta):
    serving = np.asarray(serving)
    if serving.ndim != 1 or len(serving) != beta.shape[0]:
        raise ConsistencyError("关联结果缺失：serving 与链路矩阵的 UE 数不一致")
    if np.any(serving < 0) or np.any(serving >= beta.shape[1]):
        raise ConsistencyError("关联结果缺失：存在未关联到任何小区的 UE")
    return serving


def received_power_per_prb(beta, fading_power, prb_power_mw, beam_gain=None):
    """
    各链路在各 PRB 上的接收功率（mW），形状 (N_UE, N_cells, N_PRB)

    beam_gain 为地面 5G 的波束阵因子（线性）；为 None 时为单天线/固定波束。
    """
    power = np.asarray(beta, dtype=float)[..., None] * fading_power * prb_power_mw
    if beam_gain is not None:
        power = power * beam_gain
    return power


def split_signal_interference(rx_power, serving, interference=True, activity=None):
    """
    把接收功率拆为有用信号与小区间干扰，均为 (N_UE, N_PRB)

    每个干扰小区在 PRB k 上只服务一个被调度 UE，其功率即该小区在 k 上的发射功率，
    因此对 u' ∈ U_c 的求和已体现在 rx_power 的波束项中。
    activity 为 (N_cells, N_PRB) 的 0/1 掩码，标记各小区在各 PRB 上是否发射；
    只作用于干扰项，为 None 时所有小区满负载。
    """
    idx = np.arange(rx_power.shape[0])
    signal = rx_power[idx, serving, :]
    if not interference:
        return signal, np.zeros_like(signal)
    others = np.ones(rx_power.shape[:2])
    others[idx, serving] = 0.0
    if activity is None:
        return signal, np.einsum("uck,uc->uk", rx_power, others)
    return signal, np.einsum("uck,uc,ck->uk", rx_power, others, np.asarray(activity, dtype=float))


def sinr_ntn_per_prb(beta, fading_power, serving, prb_power_mw, noise_mw, interference=True, activity=None):
    """
    NTN 每 PRB SINR（线性），反射面视作单天线，信道为标量、无预编码

    γ_{u,k} = β_{u,ĉ}·|h_{u,ĉ,k}|²·p / (Σ_{c≠ĉ} β_{u,c}·|h_{u,c,k}|²·p + σ_k²)

    参数
    ----------
    beta : (N_UE, N_cells) 线性大尺度增益
    fading_power : (N_UE, N_cells, N_PRB) |h|²
    serving : (N_UE,) 服务小区
    prb_power_mw : 每 PRB 发射功率
    noise_mw : 每 PRB 噪声功率
    interference : False 时分母只剩噪声
    activity : 可选，(N_cells, N_PRB) 干扰小区发射掩码
    """
    beta = np.asarray(beta, dtype=float)
    serving = _check_serving(serving, beta)
    rx = received_power_per_prb(beta, fading_power, prb_power_mw)
    signal, interf = split_signal_interference(rx, serving, interference, activity)
    return signal / (interf + noise_mw)


def sinr_tn_per_prb(beta, fading_power, serving, prb_power_mw, noise_mw, beam_gain=None, interference=True,
                    activity=None):
    """
    地面每 PRB SINR（线性），单层单波束

    γ_{u,k} = β_{u,ĉ}·|h·w_u|²·p / (Σ_{c≠ĉ} Σ_{u'∈U_c} β_{u,c}·|h·w_{u'}|²·p_{u'} + σ_k²)

    |h·w|² 拆为 |h|²（快衰落）与波束阵因子 beam_gain[u, c, k]：
    服务小区的波束指向 u 本身，干扰小区 c 的波束指向其在 PRB k 上调度的 UE。
    固定扇区波束（4G 面板或 5G 固定波束）时 beam_gain 为 None。
    """
    beta = np.asarray(beta, dtype=float)
    serving = _check_serving(serving, beta)
    rx = received_power_per_prb(beta, fading_power, prb_power_mw, beam_gain)
    signal, interf = split_signal_interference(rx, serving, interference, activity)
    return signal / (interf + noise_mw)


def effective_sinr(per_prb_sinr):
    """
    基于互信息（高斯输入）的有效 SINR 映射，沿最后一维压缩

    γ̃ = 2^{mean_k log2(1+γ_k)} - 1

    异常
    ----------
    EmptyInputError : 没有任何 PRB
    """
    sinr = np.asarray(per_prb_sinr, dtype=float)
    if sinr.size == 0 or sinr.shape[-1] == 0:
        raise EmptyInputError("有效 SINR 映射至少需要一个 PRB")
    return np.exp2(np.mean(np.log2(1.0 + sinr), axis=-1)) - 1.0
