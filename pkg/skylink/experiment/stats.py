from dataclasses import asdict, dataclass

import numpy as np

from skylink.errors import EmptyInputError


@dataclass(frozen=True)
class AggregateStats:
    """
    跨投放汇总的 UE 统计量

    SINR 为有效 SINR（dB），吞吐量为 Mbps，频谱效率为 bps/Hz。
    分位数使用线性插值。
    """
    mean_sinr_db: float
    median_sinr_db: float
    p5_sinr_db: float
    mean_tput_mbps: float
    median_tput_mbps: float
    p5_tput_mbps: float
    mean_se_bpshz: float
    median_se_bpshz: float
    n_samples: int

    def to_dict(self):
        return asdict(self)


def percentile(values, q):
    """线性插值分位数，q ∈ [0, 100]"""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise EmptyInputError("分位数需要至少一个样本")
    return float(np.percentile(values, q, method="linear"))


def aggregate_stats(results):
    """
    汇总多个投放（或多批 UE）的结果

    参数
    ----------
    results : UeResult 或 DropResult 的列表，每个元素需提供 eff_sinr、rate_bps、spectral_efficiency

    返回
    ----------
    AggregateStats

    异常
    ----------
    EmptyInputError : 没有任何 UE 样本
    """
    ues = [getattr(r, "ue", r) for r in results]
    if not ues or sum(len(u.eff_sinr) for u in ues) == 0:
        raise EmptyInputError("没有可汇总的 UE 结果")
    sinr_db = 10.0 * np.log10(np.concatenate([u.eff_sinr for u in ues]))
    tput = np.concatenate([u.rate_bps for u in ues]) / 1e6
    se = np.concatenate([u.spectral_efficiency for u in ues])
    return AggregateStats(
        mean_sinr_db=float(np.mean(sinr_db)),
        median_sinr_db=percentile(sinr_db, 50),
        p5_sinr_db=percentile(sinr_db, 5),
        mean_tput_mbps=float(np.mean(tput)),
        median_tput_mbps=percentile(tput, 50),
        p5_tput_mbps=percentile(tput, 5),
        mean_se_bpshz=float(np.mean(se)),
        median_se_bpshz=percentile(se, 50),
        n_samples=int(tput.size),
    )
