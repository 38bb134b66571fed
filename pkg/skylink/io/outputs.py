"""
结果文件写出

所有表格产物都经由 pandas.DataFrame 写成带表头的 CSV，数值统一保留 6 位有效数字。
"""
import logging
import os

import numpy as np
import pandas as pd

from skylink.errors import OutputError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.6g"

SWEEP_COLUMNS = ["altitude_m", "aperture_wl", "mean_sinr_db", "mean_tput_mbps", "median_tput_mbps",
                 "p5_tput_mbps", "mean_se_bpshz"]
# 续跑所需的其余统计量，附在固定列之后
SWEEP_EXTRA_COLUMNS = ["median_sinr_db", "p5_sinr_db", "median_se_bpshz", "n_samples"]
BEST_COLUMNS = ["altitude_m", "best_aperture_wl", "best_mean_tput_mbps", "fit_aperture_wl"]
UE_COLUMNS = ["drop", "ue", "cell", "eff_sinr_db", "rate_mbps", "se_bpshz"]
HEATMAP_COLUMNS = ["x_m", "y_m", "sinr_db", "useful_dbm", "interference_dbm"]
HOTSPOT_COLUMNS = ["cell", "boresight_x_m", "boresight_y_m", "hotspot_x_m", "hotspot_y_m", "distance_m",
                   "is_local_max", "interference_dbm", "sinr_db", "ring_radius_m", "ring_interference_dbm",
                   "sinr_dip_db"]
COMPARE_COLUMNS = ["scenario", "deployment_kind", "altitude_m", "aperture_wl", "bandwidth_mhz",
                   "mean_sinr_db", "mean_tput_mbps", "median_tput_mbps", "p5_tput_mbps",
                   "mean_se_bpshz", "median_se_bpshz"]
SITE_COLUMNS = ["site_id", "x", "y"]
UE_POSITION_COLUMNS = ["ue_id", "cell_id", "x", "y"]
LINK_COLUMNS = ["ue", "cell", "los", "pl_db", "sf_db", "gain_dbi", "beta"]
PATTERN_COLUMNS = ["theta_deg", "gain_dbi"]
FOOTPRINT_COLUMNS = ["aperture_wl", "altitude_m", "hpbw_deg", "radius_m"]


def ensure_writable(path, force=False):
    """目标已存在且未指定 force 时拒绝覆盖"""
    if os.path.exists(path) and not force:
        raise OutputError(f"{path} 已存在，使用 --force 覆盖")


def write_csv(frame, path, force=False):
    """
    写出一张完整的表

    参数
    ----------
    frame : pandas.DataFrame
    path : 目标文件
    force : 是否允许覆盖

    返回
    ----------
    str: 写出的路径
    """
    ensure_writable(path, force)
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as exc:
        raise OutputError(f"无法写出 {path}: {exc}") from exc
    logger.info("已写出 %s（%d 行）", path, len(frame))
    return path


def append_csv(frame, path):
    """向已有 CSV 追加数据行，文件不存在时连同表头一起写出"""
    header = not os.path.exists(path)
    try:
        frame.to_csv(path, mode="a", header=header, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as exc:
        raise OutputError(f"无法追加到 {path}: {exc}") from exc
    return path


def read_csv(path):
    try:
        return pd.read_csv(path)
    except OSError as exc:
        raise OutputError(f"无法读取 {path}: {exc}") from exc


def ue_results_frame(drop_results):
    """每个投放、每个 UE 一行"""
    parts = []
    for result in drop_results:
        ue = result.ue
        n = len(ue)
        parts.append(pd.DataFrame({
            "drop": np.full(n, result.drop_index),
            "ue": np.arange(n),
            "cell": ue.serving_cell,
            "eff_sinr_db": ue.eff_sinr_db,
            "rate_mbps": ue.rate_bps / 1e6,
            "se_bpshz": ue.spectral_efficiency,
        }))
    if not parts:
        return pd.DataFrame(columns=UE_COLUMNS)
    return pd.concat(parts, ignore_index=True)[UE_COLUMNS]


def layout_frames(deployment):
    """返回 (sites, ues) 两张表"""
    sites = pd.DataFrame({"site_id": np.arange(len(deployment.sites)),
                          "x": deployment.sites[:, 0], "y": deployment.sites[:, 1]})
    ues = pd.DataFrame({"ue_id": np.arange(len(deployment.ues)), "cell_id": deployment.ue_cell,
                        "x": deployment.ues[:, 0], "y": deployment.ues[:, 1]})
    return sites[SITE_COLUMNS], ues[UE_POSITION_COLUMNS]


def links_frame(links):
    """每条 UE–小区链路一行的大尺度状态"""
    n_ue, n_cells = links.pathloss_db.shape
    ue, cell = np.meshgrid(np.arange(n_ue), np.arange(n_cells), indexing="ij")
    los = np.asarray(links.los)
    return pd.DataFrame({
        "ue": ue.ravel(),
        "cell": cell.ravel(),
        "los": los.astype(int).ravel() if los.dtype == bool else los.ravel(),
        "pl_db": links.pathloss_db.ravel(),
        "sf_db": links.shadowing_db.ravel(),
        "gain_dbi": links.antenna_gain_dbi.ravel(),
        "beta": links.beta.ravel(),
    })[LINK_COLUMNS]


def emit_outputs(tables, out_dir, force=False):
    """
    把一组表写入输出目录

    参数
    ----------
    tables : dict，{文件名: DataFrame}
    out_dir : 输出目录
    force : 是否允许覆盖已有文件

    返回
    ----------
    list: 写出的文件名（相对 out_dir，按写出顺序）

    异常
    ----------
    OutputError : 目标已存在且未指定 force，或写出失败
    """
    for name in tables:
        ensure_writable(os.path.join(out_dir, name), force)
    written = []
    for name, frame in tables.items():
        write_csv(frame, os.path.join(out_dir, name), force=True)
        written.append(name)
    return written
