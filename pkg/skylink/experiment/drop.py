import logging
import multiprocessing
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from skylink.propagation.antenna import ReflectorAntenna, SectorAntenna
from skylink.propagation.channel import (LargeScaleState, compose_large_scale, los_phase, ntn_k_factor_db,
                                         ntn_pathloss, rician_fade, shadowing_sigma_db, tn_pathloss)
from skylink.propagation.geometry import Deployment, LinkGeometry, build_hex_layout, deployment_link_geometry
from skylink.propagation.los import LosGeometryParams, los_probability
from skylink.link.association import AssociationMap, associate
from skylink.link.rate import UeResult, spectral_efficiency, ue_rate
from skylink.link.sinr import (effective_sinr, received_power_per_prb, sinr_ntn_per_prb, sinr_tn_per_prb,
                               split_signal_interference)
from skylink.experiment.rng import DropStreams
from skylink.scenario.config import validate_config
from skylink.scenario.radio import derive_radio_constants

logger = logging.getLogger(__name__)

# 每批处理的 (接收点 × 小区 × PRB) 元素上限，控制内存
CHUNK_ELEMENTS = 1_500_000


@dataclass(frozen=True)
class LinkState:
    """
    接收点 × 小区的大尺度链路状态，数组形状均为 (N_points, N_cells)

    los 在 draw 模式下为 bool，在 expectation 模式下为 LoS 概率。
    antenna_gain_dbi 在 "ue" 波束模式下只含单元增益，波束阵因子在每 PRB 上另算。
    """
    geometry: LinkGeometry
    los: np.ndarray
    pathloss_db: np.ndarray
    shadowing_db: np.ndarray
    antenna_gain_dbi: np.ndarray
    k_factor_linear: np.ndarray

    @property
    def beta(self):
        return compose_large_scale(self.pathloss_db, self.shadowing_db, self.antenna_gain_dbi)

    @property
    def beta_db(self):
        return -self.pathloss_db + self.shadowing_db + self.antenna_gain_dbi

    def large_scale(self):
        return LargeScaleState.from_db(self.los, self.pathloss_db, self.shadowing_db, self.antenna_gain_dbi)


class LinkBudget:
    """
    链路预算计算器：给定部署，计算任意接收点到全部小区的大尺度状态与每 PRB 衰落

    使用示例：
    >>> budget = LinkBudget(cfg, radio, deployment)
    >>> state = budget.large_scale_for(points, rng_los, rng_shadowing)
    """

    def __init__(self, cfg, radio, deployment):
        self.cfg = cfg
        self.radio = radio
        self.deployment = deployment
        self.is_ntn = cfg.kind.is_ntn
        self.regime = "NTN" if self.is_ntn else "TN"
        self.reflector = ReflectorAntenna.for_config(cfg) if self.is_ntn else None
        self.sector = None if self.is_ntn else SectorAntenna.for_config(cfg)
        self.los_params = LosGeometryParams.for_config(cfg)

    @property
    def h_tx_m(self):
        return self.cfg.h_ntn_m if self.is_ntn else self.cfg.h_tn_m

    @property
    def steered(self):
        return self.sector is not None and self.sector.steered

    def antenna_gain(self, geo):
        if self.is_ntn:
            return self.reflector.gain(geo.offboresight_deg)
        return self.sector.sector_gain(geo.theta_local_deg, geo.phi_local_deg)

    def pathloss(self, geo, los):
        if self.is_ntn:
            return ntn_pathloss(geo, los, self.cfg.carrier_hz, self.cfg).total_db
        return tn_pathloss(geo, los, self.cfg.carrier_hz, self.cfg.h_tn_m, self.cfg.h_ue_m)

    def los_k_factor(self, geo):
        if self.is_ntn:
            return 10.0 ** (ntn_k_factor_db(geo.elevation_deg) / 10.0)
        return np.full(geo.d2d_m.shape, 10.0 ** (self.cfg.tn_k_factor_db / 10.0))

    def _sigmas(self, geo):
        if self.cfg.shadowing_sigma_db is not None:
            sigma = np.full(geo.d2d_m.shape, float(self.cfg.shadowing_sigma_db))
            return sigma, sigma
        los = np.ones(geo.d2d_m.shape, dtype=bool)
        return (shadowing_sigma_db(los, self.regime, geo.elevation_deg),
                shadowing_sigma_db(~los, self.regime, geo.elevation_deg))

    def large_scale_for(self, points, rng_los, rng_shadowing):
        """
        计算接收点到全部小区的大尺度状态

        参数
        ----------
        points : (N, 3) 接收点坐标
        rng_los / rng_shadowing : 本批接收点的 LoS 与阴影随机流

        返回
        ----------
        LinkState
        """
        geo = deployment_link_geometry(self.deployment, points)
        p_los = los_probability(geo.elevation_deg, self.h_tx_m, self.los_params, terrestrial=not self.is_ntn)
        gain = self.antenna_gain(geo)
        sigma_los, sigma_nlos = self._sigmas(geo)
        k_los = self.los_k_factor(geo)

        if self.cfg.los_mode == "draw":
            los = rng_los.random(p_los.shape) < p_los
            pl = self.pathloss(geo, los)
            sigma = np.where(los, sigma_los, sigma_nlos)
            k = np.where(los, k_los, 0.0)
        else:
            all_los = np.ones(p_los.shape, dtype=bool)
            rho = p_los * 10.0 ** (-self.pathloss(geo, all_los) / 10.0) \
                + (1.0 - p_los) * 10.0 ** (-self.pathloss(geo, ~all_los) / 10.0)
            pl = -10.0 * np.log10(rho)
            sigma = p_los * sigma_los + (1.0 - p_los) * sigma_nlos
            k = p_los * k_los
            los = p_los
        shadowing = sigma * rng_shadowing.standard_normal(p_los.shape)
        return LinkState(geometry=geo, los=los, pathloss_db=pl, shadowing_db=shadowing,
                         antenna_gain_dbi=gain, k_factor_linear=k)

    def fading_power(self, state, rows, streams, stream_name):
        """rows 中每个接收点对全部小区的每 PRB |h|²，形状 (len(rows), N_cells, N_PRB)"""
        n_prb = self.radio.n_prb
        out = np.empty((len(rows), state.k_factor_linear.shape[1], n_prb))
        for i, row in enumerate(rows):
            phase = los_phase(state.geometry.d3d_m[row], self.radio.wavelength_m)
            fade = rician_fade(streams(stream_name, row), state.k_factor_linear[row], n_prb, phase)
            out[i] = fade.power
        return out


def schedule_beams(association, n_prb, rng):
    """
    每个小区在每个 PRB 上被调度的 UE（轮询下等价于在 U_c 中均匀抽取）

    返回 (N_cells, N_PRB) 的 UE 下标，空小区为 -1（波束指向法线方向）。
    """
    n_cells = len(association.served)
    targets = np.full((n_cells, n_prb), -1, dtype=int)
    for c, served in enumerate(association.served):
        if len(served):
            targets[c] = served[rng.integers(0, len(served), size=n_prb)]
    return targets


def prb_activity(n_cells, n_prb, activity, rng):
    """
    各小区在各 PRB 上是否发射，形状 (N_cells, N_PRB) 的 0/1 数组

    activity ≥ 1 时满负载，返回 None（不消耗随机数）。
    """
    if activity >= 1.0:
        return None
    return (rng.random((n_cells, n_prb)) < activity).astype(float)


def beam_directions(targets, ue_state):
    """被调度 UE 在各小区天线坐标系中的方向 (theta, phi)，形状 (N_cells, N_PRB)"""
    cells = np.arange(targets.shape[0])[:, None]
    safe = np.where(targets >= 0, targets, 0)
    theta = np.where(targets >= 0, ue_state.geometry.theta_local_deg[safe, cells], 90.0)
    phi = np.where(targets >= 0, ue_state.geometry.phi_local_deg[safe, cells], 0.0)
    return theta, phi


@dataclass(frozen=True)
class DropResult:
    """
    一次投放的结果

    ue : 全部 UE 的 UeResult
    load : (N_cells,) 每个小区服务的 UE 数
    """
    drop_index: int
    ue: UeResult
    load: np.ndarray
    deployment: Optional[Deployment] = None
    association: Optional[AssociationMap] = None
    links: Optional[LinkState] = None


class DropSimulator:
    """
    单次蒙特卡洛投放

    依次完成 UE 投放、LoS/阴影/衰落抽样、按 RSRP 关联、每 PRB SINR、有效 SINR 映射与速率计算。
    结果只取决于 (配置, 种子, 投放编号)。

    使用示例：
    >>> sim = DropSimulator(cfg, drop_index=0)
    >>> result = sim.compute()
    >>> useful, interference, eff = sim.evaluate_points(points)
    """

    def __init__(self, cfg, drop_index=0, interference=True):
        self.cfg = validate_config(cfg)
        self.drop_index = drop_index
        self.interference = interference
        self.radio = derive_radio_constants(self.cfg)
        self.streams = DropStreams(self.cfg.rng_seed, drop_index)

        self.deployment = None
        self.budget = None
        self.links = None
        self.association = None
        self.beam_targets = None
        self.beam_theta = None
        self.beam_phi = None
        self.activity = None
        self.result = None

    def compute(self):
        """
        执行一次完整投放

        返回
        ----------
        DropResult
        """
        cfg, radio = self.cfg, self.radio
        self.deployment = build_hex_layout(cfg, self.streams("layout"))
        self.budget = LinkBudget(cfg, radio, self.deployment)
        self.links = self.budget.large_scale_for(self.deployment.ues, self.streams("los"), self.streams("shadowing"))
        self.association = associate(radio.prb_tx_power_dbm + self.links.beta_db)
        self.activity = prb_activity(self.deployment.n_cells, radio.n_prb, cfg.interferer_activity,
                                     self.streams("activity"))

        if self.budget.steered:
            self.beam_targets = schedule_beams(self.association, radio.n_prb, self.streams("beams"))
            self.beam_theta, self.beam_phi = beam_directions(self.beam_targets, self.links)

        serving = self.association.serving_cell
        prb_sinr = np.empty((len(serving), radio.n_prb))
        for rows in self._chunks(len(serving)):
            fading = self.budget.fading_power(self.links, rows, self.streams, "fading")
            beta = self.links.beta[rows]
            if self.budget.steered:
                beam = self._beam_gain(self.links, rows, serving[rows])
                prb_sinr[rows] = sinr_tn_per_prb(beta, fading, serving[rows], radio.prb_tx_power_mw,
                                                 radio.noise_per_prb_mw, beam, self.interference, self.activity)
            elif self.budget.is_ntn:
                prb_sinr[rows] = sinr_ntn_per_prb(beta, fading, serving[rows], radio.prb_tx_power_mw,
                                                  radio.noise_per_prb_mw, self.interference, self.activity)
            else:
                prb_sinr[rows] = sinr_tn_per_prb(beta, fading, serving[rows], radio.prb_tx_power_mw,
                                                 radio.noise_per_prb_mw, None, self.interference, self.activity)

        eff = effective_sinr(prb_sinr)
        rate = ue_rate(eff, serving, self.association.load, radio)
        ue = UeResult(serving_cell=serving, prb_sinr=prb_sinr, eff_sinr=eff, rate_bps=rate,
                      spectral_efficiency=spectral_efficiency(rate, cfg.bandwidth_hz))
        self.result = DropResult(drop_index=self.drop_index, ue=ue, load=self.association.load,
                                 deployment=self.deployment, association=self.association, links=self.links)
        logger.debug("投放 %d 完成：%s，平均速率 %.2f Mbps", self.drop_index, cfg.kind.value, rate.mean() / 1e6)
        return self.result

    def _chunks(self, n_points):
        per_point = self.deployment.n_cells * self.radio.n_prb
        size = max(1, CHUNK_ELEMENTS // per_point)
        for start in range(0, n_points, size):
            yield np.arange(start, min(start + size, n_points))

    def _beam_gain(self, state, rows, serving):
        """
        地面 5G 的每 PRB 波束阵因子，形状 (len(rows), N_cells, N_PRB)

        干扰小区的波束指向其在该 PRB 上调度的 UE；服务小区的波束指向接收点本身。
        """
        theta_v = state.geometry.theta_local_deg[rows][:, :, None]
        phi_v = state.geometry.phi_local_deg[rows][:, :, None]
        gain = self.budget.sector.steering_gain((self.beam_theta[None], self.beam_phi[None]), (theta_v, phi_v))
        gain[np.arange(len(rows)), serving, :] = self.budget.sector.n_elements
        return gain

    def evaluate_points(self, points):
        """
        在不改变负载的前提下，评估任意接收点（热力图像素）的接收质量

        接收点按 RSRP 选择服务小区，服务波束指向自身；其它小区保持本次投放的调度、波束与 PRB 占用。

        返回
        ----------
        tuple:
            (useful_mw, interference_mw, eff_sinr)，useful/interference 为全带宽接收功率
        """
        if self.result is None:
            raise ValueError("请先调用 .compute()")
        radio = self.radio
        points = np.asarray(points, dtype=float)
        state = self.budget.large_scale_for(points, self.streams("pixel_los"), self.streams("pixel_shadowing"))
        serving = np.argmax(state.beta_db, axis=1)
        useful = np.empty(len(points))
        interf = np.empty(len(points))
        eff = np.empty(len(points))
        for rows in self._chunks(len(points)):
            fading = self.budget.fading_power(state, rows, self.streams, "pixel_fading")
            beam = self._beam_gain(state, rows, serving[rows]) if self.budget.steered else None
            rx = received_power_per_prb(state.beta[rows], fading, radio.prb_tx_power_mw, beam)
            s, i = split_signal_interference(rx, serving[rows], self.interference, self.activity)
            useful[rows] = s.sum(axis=1)
            interf[rows] = i.sum(axis=1)
            eff[rows] = effective_sinr(s / (i + radio.noise_per_prb_mw))
        return useful, interf, eff


def run_drop(cfg, drop_index, interference=True):
    """执行编号为 drop_index 的一次投放，返回 DropResult"""
    return DropSimulator(cfg, drop_index, interference=interference).compute()


def _drop_task(task):
    cfg, drop_index, interference, details = task
    result = run_drop(cfg, drop_index, interference)
    if details:
        return result
    return replace(result, deployment=None, association=None, links=None)


def run_drops(cfg, n_drops=None, threads=1, interference=True, details=False, pool=None):
    """
    执行编号 0..n_drops-1 的投放，结果按编号排序，与进程数无关

    参数
    ----------
    cfg : ScenarioConfig
    n_drops : 投放次数，默认取 cfg.n_drops
    threads : 工作进程数，≤ 1 时串行
    details : False 时丢弃部署、关联与链路矩阵，只保留 UE 结果
    pool : 复用已有的 multiprocessing.Pool
    """
    cfg = validate_config(cfg)
    n = cfg.n_drops if n_drops is None else int(n_drops)
    tasks = [(cfg, d, interference, details) for d in range(n)]
    if pool is not None:
        return pool.map(_drop_task, tasks, chunksize=1)
    if threads <= 1 or n <= 1:
        return [_drop_task(t) for t in tasks]
    with multiprocessing.Pool(processes=min(threads, n)) as workers:
        return workers.map(_drop_task, tasks, chunksize=1)
