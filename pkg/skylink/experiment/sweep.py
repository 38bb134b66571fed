import json
import logging
import multiprocessing
import os
from dataclasses import dataclass, field, replace
from typing import Dict, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from skylink.errors import ConsistencyError, EmptyInputError
from skylink.experiment.drop import run_drops
from skylink.experiment.stats import AggregateStats, aggregate_stats
from skylink.io.manifest import read_json, write_json
from skylink.io.outputs import (BEST_COLUMNS, COMPARE_COLUMNS, SWEEP_COLUMNS, SWEEP_EXTRA_COLUMNS,
                                append_csv, read_csv)
from skylink.scenario.config import DeploymentKind, validate_config, with_design_point

logger = logging.getLogger(__name__)

DEFAULT_ALTITUDES_M = tuple(1000.0 * k for k in range(1, 21))
DEFAULT_APERTURES_WL = tuple(float(a) for a in range(5, 51, 5))
# 两个最优 NTN 配置：(高度 m, 口径 λ)
DEFAULT_NTN_POINTS = ((8000.0, 25.0), (5000.0, 15.0))


def _key(altitude_m, aperture_wl):
    return round(float(altitude_m), 3), round(float(aperture_wl), 3)


@dataclass
class SweepGrid:
    """
    (高度, 口径) 设计空间上的汇总统计

    stats 以 (altitude_m, aperture_wl) 为键；未完成的网格点不在其中。
    """
    altitudes_m: Tuple[float, ...]
    apertures_wl: Tuple[float, ...]
    stats: Dict[Tuple[float, float], AggregateStats] = field(default_factory=dict)

    def points(self):
        return [_key(h, a) for h in self.altitudes_m for a in self.apertures_wl]

    @property
    def is_complete(self):
        return all(p in self.stats for p in self.points())

    def get(self, altitude_m, aperture_wl):
        return self.stats[_key(altitude_m, aperture_wl)]

    def to_frame(self):
        """按高度、口径顺序输出已完成的网格点"""
        rows = [_stats_row(p, self.stats[p]) for p in self.points() if p in self.stats]
        return pd.DataFrame(rows, columns=SWEEP_COLUMNS + SWEEP_EXTRA_COLUMNS)


def _stats_row(point, stats):
    row = {"altitude_m": point[0], "aperture_wl": point[1]}
    row.update(stats.to_dict())
    return row


def _stats_from_row(row):
    return AggregateStats(
        mean_sinr_db=float(row["mean_sinr_db"]),
        median_sinr_db=float(row["median_sinr_db"]),
        p5_sinr_db=float(row["p5_sinr_db"]),
        mean_tput_mbps=float(row["mean_tput_mbps"]),
        median_tput_mbps=float(row["median_tput_mbps"]),
        p5_tput_mbps=float(row["p5_tput_mbps"]),
        mean_se_bpshz=float(row["mean_se_bpshz"]),
        median_se_bpshz=float(row["median_se_bpshz"]),
        n_samples=int(row["n_samples"]),
    )


def sweep_state_path(out_csv):
    """续跑核对用的配置快照，与 sweep.csv 同目录：sweep.csv -> sweep_config.json"""
    return os.path.splitext(out_csv)[0] + "_config.json"


def check_resume_state(cfg, out_csv):
    """
    核对续跑时的配置与写出已完成网格点时的配置是否一致

    快照为 cfg.to_dict()，包含 rng_seed 与 n_drops；任何字段不同都意味着
    已完成的行与待补的行不可混在同一张表里。

    异常
    ----------
    ConsistencyError : 快照缺失而 sweep.csv 已有数据，或字段不一致
    """
    state = sweep_state_path(out_csv)
    if not os.path.exists(state):
        if os.path.exists(out_csv) and len(read_csv(out_csv)):
            raise ConsistencyError(f"无法续跑：缺少 {os.path.basename(state)}，不能核对已完成网格点的配置")
        return
    recorded = read_json(state)
    current = json.loads(json.dumps(cfg.to_dict()))
    changed = sorted(k for k in set(recorded) | set(current) if recorded.get(k) != current.get(k))
    if changed:
        detail = "，".join(f"{k}: {recorded.get(k)!r} -> {current.get(k)!r}" for k in changed)
        raise ConsistencyError(f"无法续跑：配置与已完成的扫描不一致（{detail}）")


def load_completed(path):
    """读取已有 sweep.csv 中完成的网格点，用于续跑"""
    if not os.path.exists(path):
        return {}
    frame = read_csv(path)
    return {_key(r["altitude_m"], r["aperture_wl"]): _stats_from_row(r) for _, r in frame.iterrows()}


class SweepAnalyzer:
    """
    NTN 平台高度 × 反射面口径的穷举扫描

    每个网格点执行 cfg.n_drops 次投放并汇总；每完成一个点就追加写入 out_csv，
    中断后可用 resume=True 跳过已完成的点。投放在进程池中并行，
    结果只取决于 (配置, 种子)，与进程数无关。

    使用示例：
    >>> sweep = SweepAnalyzer(cfg, altitudes_m=[5000, 8000], apertures_wl=[15, 25], threads=4)
    >>> grid = sweep.compute()
    >>> best, fit = sweep.best()
    """

    def __init__(self, cfg, altitudes_m=DEFAULT_ALTITUDES_M, apertures_wl=DEFAULT_APERTURES_WL,
                 threads=1, out_csv=None, resume=False, progress=False):
        self.cfg = validate_config(cfg)
        if not self.cfg.kind.is_ntn:
            raise ConsistencyError("参数扫描仅适用于 NTN5G 配置")
        self.altitudes_m = tuple(float(h) for h in altitudes_m)
        self.apertures_wl = tuple(float(a) for a in apertures_wl)
        self.threads = threads
        self.out_csv = out_csv
        self.resume = resume
        self.progress = progress
        self.grid = None

    def _point_configs(self):
        # 先整体校验，避免扫描到一半才发现非法网格点
        return [(_key(h, a), with_design_point(self.cfg, h, a))
                for h in self.altitudes_m for a in self.apertures_wl]

    def compute(self):
        """
        执行扫描

        返回
        ----------
        SweepGrid
        """
        tasks = self._point_configs()
        grid = SweepGrid(self.altitudes_m, self.apertures_wl)
        if self.resume and self.out_csv:
            check_resume_state(self.cfg, self.out_csv)
            done = load_completed(self.out_csv)
            grid.stats.update({p: s for p, s in done.items() if p in dict(tasks)})
            logger.info("续跑：%d/%d 个网格点已完成", len(grid.stats), len(tasks))
        if self.out_csv:
            write_json(self.cfg.to_dict(), sweep_state_path(self.out_csv))
        todo = [(p, c) for p, c in tasks if p not in grid.stats]

        pool = multiprocessing.Pool(self.threads) if self.threads > 1 and todo else None
        try:
            for point, cfg in tqdm(todo, desc="sweep", unit="点", disable=not self.progress):
                stats = aggregate_stats(run_drops(cfg, threads=self.threads, pool=pool))
                grid.stats[point] = stats
                if self.out_csv:
                    append_csv(pd.DataFrame([_stats_row(point, stats)],
                                            columns=SWEEP_COLUMNS + SWEEP_EXTRA_COLUMNS), self.out_csv)
                logger.debug("网格点 h=%.0f m, r=%.0fλ：平均吞吐 %.2f Mbps", point[0], point[1], stats.mean_tput_mbps)
        except BaseException:
            logger.warning("扫描中断，已完成 %d/%d 个网格点", len(grid.stats), len(tasks))
            raise
        finally:
            if pool is not None:
                pool.close()
                pool.join()

        self.grid = grid
        return grid

    def best(self):
        if self.grid is None:
            raise ValueError("请先调用 .compute()")
        return best_apertures(self.grid)


def run_sweep(cfg, altitudes_m=DEFAULT_ALTITUDES_M, apertures_wl=DEFAULT_APERTURES_WL, threads=1,
              out_csv=None, resume=False, progress=False):
    """SweepAnalyzer 的函数式入口，返回 SweepGrid"""
    return SweepAnalyzer(cfg, altitudes_m, apertures_wl, threads=threads, out_csv=out_csv,
                         resume=resume, progress=progress).compute()


@dataclass(frozen=True)
class LinearFit:
    """最优口径随高度的线性拟合：aperture_wl ≈ slope·altitude_km + intercept"""
    slope_wl_per_km: float
    intercept_wl: float

    def __call__(self, altitude_m):
        return self.slope_wl_per_km * np.asarray(altitude_m, dtype=float) / 1000.0 + self.intercept_wl


def best_apertures(grid):
    """
    每个高度上平均吞吐量最大的口径，并列时取较小口径

    返回
    ----------
    tuple:
        (DataFrame[BEST_COLUMNS], LinearFit)，高度少于两个时拟合系数为 nan
    """
    rows = []
    for h in grid.altitudes_m:
        candidates = [(a, grid.stats[_key(h, a)].mean_tput_mbps)
                      for a in grid.apertures_wl if _key(h, a) in grid.stats]
        if not candidates:
            continue
        aperture, tput = max(candidates, key=lambda t: (t[1], -t[0]))
        rows.append({"altitude_m": h, "best_aperture_wl": aperture, "best_mean_tput_mbps": tput})
    if not rows:
        raise EmptyInputError("扫描网格中没有已完成的点")
    frame = pd.DataFrame(rows)
    if len(frame) >= 2:
        slope, intercept = np.polyfit(frame["altitude_m"] / 1000.0, frame["best_aperture_wl"], 1)
    else:
        slope, intercept = np.nan, np.nan
    fit = LinearFit(float(slope), float(intercept))
    frame["fit_aperture_wl"] = fit(frame["altitude_m"])
    return frame[BEST_COLUMNS], fit


def compare_configs(cfg, ntn_points=DEFAULT_NTN_POINTS):
    """
    生成对比实验的场景列表 [(名称, 配置)]

    载频、带宽与发射功率按各部署形态的默认值重新填充，其余参数沿用 cfg。
    """
    base = replace(cfg, carrier_hz=None, bandwidth_hz=None, tx_power_dbm=None)
    scenarios = [
        ("TN4G", validate_config(replace(base, deployment_kind=DeploymentKind.TN4G))),
        ("TN5G", validate_config(replace(base, deployment_kind=DeploymentKind.TN5G))),
    ]
    ntn = replace(base, deployment_kind=DeploymentKind.NTN5G)
    for h, a in ntn_points:
        scenarios.append((f"NTN5G_{h / 1000.0:g}km_{a:g}wl", with_design_point(ntn, h, a)))
    return scenarios


def compare(cfg, ntn_points=DEFAULT_NTN_POINTS, threads=1, progress=False):
    """
    地面 4G / 5G 与若干 NTN 设计点的对比表，每个场景一行

    返回
    ----------
    pandas.DataFrame[COMPARE_COLUMNS]
    """
    rows = []
    for name, scenario in tqdm(compare_configs(cfg, ntn_points), desc="compare", disable=not progress):
        stats = aggregate_stats(run_drops(scenario, threads=threads))
        ntn = scenario.kind.is_ntn
        rows.append({
            "scenario": name,
            "deployment_kind": scenario.kind.value,
            "altitude_m": scenario.h_ntn_m if ntn else scenario.h_tn_m,
            "aperture_wl": scenario.aperture_radius_wavelengths if ntn else np.nan,
            "bandwidth_mhz": scenario.bandwidth_hz / 1e6,
            "mean_sinr_db": stats.mean_sinr_db,
            "mean_tput_mbps": stats.mean_tput_mbps,
            "median_tput_mbps": stats.median_tput_mbps,
            "p5_tput_mbps": stats.p5_tput_mbps,
            "mean_se_bpshz": stats.mean_se_bpshz,
            "median_se_bpshz": stats.median_se_bpshz,
        })
        logger.info("%s：中位吞吐 %.2f Mbps，平均频谱效率 %.3f bps/Hz",
                    name, stats.median_tput_mbps, stats.mean_se_bpshz)
    return pd.DataFrame(rows, columns=COMPARE_COLUMNS)
