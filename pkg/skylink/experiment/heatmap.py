"""
干扰热力图

在中心站点周围的规则网格上放置虚拟 UE（不计入小区负载），
统计各像素的有用信号功率、小区间干扰功率与有效 SINR 在多次投放上的均值，
并在中心站点三个扇区的视轴地面点附近寻找干扰热点。
"""
import logging
import math
import multiprocessing
from dataclasses import dataclass

import numpy as np
import pandas as pd
from tqdm import tqdm

from skylink.errors import RangeError, ResolutionError
from skylink.experiment.drop import DropSimulator
from skylink.io.outputs import HEATMAP_COLUMNS, HOTSPOT_COLUMNS
from skylink.propagation.geometry import build_cells, hex_site_positions
from skylink.scenario.config import N_SECTORS, validate_config
from skylink.scenario.radio import derive_radio_constants

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTION_M = 10.0
MIN_RING_PIXELS = 6


@dataclass(frozen=True)
class HeatmapGrid:
    """
    地面像素网格上的平均接收指标

    x_m / y_m 为像素中心坐标；二维数组按 [iy, ix] 索引。
    功率为 dBm，SINR 为 dB。
    """
    x_m: np.ndarray
    y_m: np.ndarray
    resolution_m: float
    sinr_db: np.ndarray
    useful_dbm: np.ndarray
    interference_dbm: np.ndarray
    n_drops: int

    @property
    def n_pixels(self):
        return self.sinr_db.size

    def mesh(self):
        return np.meshgrid(self.x_m, self.y_m, indexing="xy")

    def to_frame(self):
        xx, yy = self.mesh()
        return pd.DataFrame({
            "x_m": xx.ravel(),
            "y_m": yy.ravel(),
            "sinr_db": self.sinr_db.ravel(),
            "useful_dbm": self.useful_dbm.ravel(),
            "interference_dbm": self.interference_dbm.ravel(),
        })[HEATMAP_COLUMNS]


def pixel_centers(extent_m, resolution_m):
    """以原点为中心、边长 extent_m 的正方形上 ⌈extent/resolution⌉ 个像素中心"""
    n = int(math.ceil(extent_m / resolution_m - 1e-9))
    return -extent_m / 2.0 + (np.arange(n) + 0.5) * resolution_m


def _pixel_drop(task):
    cfg, drop_index, points = task
    sim = DropSimulator(cfg, drop_index)
    sim.compute()
    return sim.evaluate_points(points)


class HeatmapAnalyzer:
    """
    热力图采样

    参数
    ----------
    cfg : ScenarioConfig
    resolution_m : 像素边长
    extent_m : 网格边长，默认 2·ISD（覆盖中心站点及其三个扇区视轴点周围的整圈）
    threads : 并行进程数（按投放划分）

    使用示例：
    >>> heat = HeatmapAnalyzer(cfg, resolution_m=10.0)
    >>> grid = heat.compute()
    >>> report = heat.hotspots()
    """

    def __init__(self, cfg, resolution_m=DEFAULT_RESOLUTION_M, extent_m=None, threads=1, progress=False):
        self.cfg = validate_config(cfg)
        if not (resolution_m > 0):
            raise RangeError("resolution_m", resolution_m)
        self.resolution_m = float(resolution_m)
        self.extent_m = float(extent_m) if extent_m is not None else 2.0 * self.cfg.isd_m
        if not (self.extent_m > 0):
            raise RangeError("extent_m", extent_m)
        self.threads = threads
        self.progress = progress
        self.grid = None

    def compute(self):
        """
        返回
        ----------
        HeatmapGrid

        异常
        ----------
        ResolutionError : 像素数超过 cfg.heatmap_max_pixels
        """
        axis = pixel_centers(self.extent_m, self.resolution_m)
        n_pixels = len(axis) ** 2
        if n_pixels > self.cfg.heatmap_max_pixels:
            raise ResolutionError(f"热力图需要 {n_pixels} 个像素，超过上限 {self.cfg.heatmap_max_pixels}")
        xx, yy = np.meshgrid(axis, axis, indexing="xy")
        points = np.column_stack([xx.ravel(), yy.ravel(), np.full(n_pixels, self.cfg.h_ue_m)])

        n_drops = self.cfg.n_drops
        tasks = [(self.cfg, d, points) for d in range(n_drops)]
        useful = np.zeros(n_pixels)
        interference = np.zeros(n_pixels)
        sinr_db = np.zeros(n_pixels)
        if self.threads > 1 and n_drops > 1:
            with multiprocessing.Pool(min(self.threads, n_drops)) as pool:
                outcomes = pool.imap(_pixel_drop, tasks)
                for u, i, e in tqdm(outcomes, total=n_drops, desc="heatmap", disable=not self.progress):
                    useful += u
                    interference += i
                    sinr_db += 10.0 * np.log10(e)
        else:
            for task in tqdm(tasks, desc="heatmap", disable=not self.progress):
                u, i, e = _pixel_drop(task)
                useful += u
                interference += i
                sinr_db += 10.0 * np.log10(e)

        shape = (len(axis), len(axis))
        with np.errstate(divide="ignore"):
            self.grid = HeatmapGrid(
                x_m=axis,
                y_m=axis.copy(),
                resolution_m=self.resolution_m,
                sinr_db=(sinr_db / n_drops).reshape(shape),
                useful_dbm=10.0 * np.log10(useful / n_drops).reshape(shape),
                interference_dbm=10.0 * np.log10(interference / n_drops).reshape(shape),
                n_drops=n_drops,
            )
        logger.info("热力图完成：%d×%d 像素，%d 次投放", shape[1], shape[0], n_drops)
        return self.grid

    def hotspots(self):
        if self.grid is None:
            raise ValueError("请先调用 .compute()")
        return hotspot_report(self.grid, self.cfg)


def sample_heatmap(cfg, resolution_m=DEFAULT_RESOLUTION_M, extent_m=None, threads=1, progress=False):
    """HeatmapAnalyzer 的函数式入口"""
    return HeatmapAnalyzer(cfg, resolution_m, extent_m, threads=threads, progress=progress).compute()


def _is_local_max(values, iy, ix):
    window = values[max(iy - 1, 0):iy + 2, max(ix - 1, 0):ix + 2]
    return bool(values[iy, ix] >= np.max(window))


def _valley_ring(interference_dbm, dist, resolution_m, max_radius_m):
    """
    视轴点周围干扰中位数最低的环带，返回 (半径, 该环带干扰中位数 dBm)

    环带宽一个像素，半径从两个像素起按像素步进到 max_radius_m；像素少于 6 个的环带忽略。
    """
    best = (None, np.inf)
    for radius in np.arange(2.0 * resolution_m, max_radius_m + 1e-9, resolution_m):
        ring = np.abs(dist - radius) <= resolution_m / 2.0
        if ring.sum() < MIN_RING_PIXELS:
            continue
        level = float(np.median(interference_dbm[ring]))
        if level < best[1]:
            best = (float(radius), level)
    return best


def hotspot_report(grid, cfg):
    """
    中心站点三个扇区的干扰热点

    在每个视轴地面点 ISD/6 范围内取干扰功率最大的像素，记录其与视轴点的距离、
    是否为 8 邻域局部极大。参照干扰取视轴点周围（半径 ≤ ISD/3）干扰中位数最低的
    环带，即相邻波束零点所在的“谷”；SINR 下降量为热点的干扰加噪声相对参照的比值

        dip = 10·log10((I_hot + N) / (I_ring + N))

    即在热点的有用信号不变时，过量干扰使 SINR 低于环带干扰水平下应有值的 dB 数。
    N 为全带宽噪声功率。

    返回
    ----------
    pandas.DataFrame[HOTSPOT_COLUMNS]
    """
    cfg = validate_config(cfg)
    radio = derive_radio_constants(cfg)
    noise_mw = radio.noise_per_prb_mw * radio.n_prb
    cells = build_cells(cfg, hex_site_positions(cfg.isd_m))[:N_SECTORS]
    xx, yy = grid.mesh()
    rows = []
    for index, cell in enumerate(cells):
        bx, by = cell.boresight_ground_xy
        dist = np.hypot(xx - bx, yy - by)
        near = dist <= cfg.isd_m / 6.0
        ring_radius, ring_dbm = _valley_ring(grid.interference_dbm, dist, grid.resolution_m, cfg.isd_m / 3.0)
        if not near.any() or ring_radius is None:
            logger.warning("小区 %d 的视轴点附近没有足够的像素，跳过热点分析", index)
            continue
        masked = np.where(near, grid.interference_dbm, -np.inf)
        iy, ix = np.unravel_index(np.argmax(masked), masked.shape)
        hot_dbm = float(grid.interference_dbm[iy, ix])
        dip = 10.0 * math.log10((10.0 ** (hot_dbm / 10.0) + noise_mw) / (10.0 ** (ring_dbm / 10.0) + noise_mw))
        rows.append({
            "cell": index,
            "boresight_x_m": bx,
            "boresight_y_m": by,
            "hotspot_x_m": float(xx[iy, ix]),
            "hotspot_y_m": float(yy[iy, ix]),
            "distance_m": float(dist[iy, ix]),
            "is_local_max": _is_local_max(grid.interference_dbm, iy, ix),
            "interference_dbm": hot_dbm,
            "sinr_db": float(grid.sinr_db[iy, ix]),
            "ring_radius_m": ring_radius,
            "ring_interference_dbm": ring_dbm,
            "sinr_dip_db": dip,
        })
    return pd.DataFrame(rows, columns=HOTSPOT_COLUMNS)
