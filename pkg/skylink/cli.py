"""
skylink 命令行入口

    skylink run      --config ntn.json --out results/run
    skylink sweep    --altitudes 1,2,5,8 --apertures 5,15,25 --threads 8 --out results/sweep
    skylink heatmap  --resolution 10 --out results/heatmap
    skylink compare  --ntn-points 8:25,5:15 --out results/compare
    skylink replay   results/run/manifest.json --out results/run-again

调试子命令：pattern / layout / links / footprint。
退出码：0 成功；2 输入或模型错误（SkylinkError）；1 其它故障。
"""
import argparse
import logging
import os
import sys
import time
from dataclasses import dataclass, replace
from datetime import datetime, timezone

import numpy as np
import pandas as pd

from skylink import __version__
from skylink.errors import RangeError, SkylinkError
from skylink.experiment.drop import DropSimulator, run_drops
from skylink.experiment.heatmap import DEFAULT_RESOLUTION_M, HeatmapAnalyzer
from skylink.experiment.rng import DropStreams
from skylink.experiment.stats import aggregate_stats
from skylink.experiment.sweep import (DEFAULT_ALTITUDES_M, DEFAULT_APERTURES_WL, DEFAULT_NTN_POINTS,
                                      best_apertures, compare, run_sweep, sweep_state_path)
from skylink.io.config_file import config_from_dict, parse_config
from skylink.io.manifest import RunManifest, load_manifest, write_manifest
from skylink.io.outputs import (FOOTPRINT_COLUMNS, PATTERN_COLUMNS, emit_outputs, ensure_writable, layout_frames,
                                links_frame, ue_results_frame, write_csv)
from skylink.propagation.antenna import ReflectorAntenna, SectorAntenna, tn_beam_gain
from skylink.propagation.geometry import build_hex_layout, footprints
from skylink.scenario.config import DeploymentKind, ScenarioConfig, validate_config

logger = logging.getLogger(__name__)

THREADS_ENV = "SKYLINK_THREADS"

# 各子命令写出的文件（manifest.json 另计）
COMMAND_OUTPUTS = {
    "run": ["ue_results.csv"],
    "sweep": ["sweep.csv", "sweep_config.json", "sweep_best.csv"],
    "heatmap": ["heatmap.csv", "hotspots.csv"],
    "compare": ["compare.csv"],
    "pattern": ["pattern.csv"],
    "layout": ["sites.csv", "ues.csv"],
    "links": ["links.csv"],
    "footprint": ["footprints.csv"],
}


@dataclass
class RunContext:
    out_dir: str
    force: bool = False
    threads: int = 1
    progress: bool = True
    resume: bool = False


def _float_list(text, scale=1.0):
    try:
        return [float(v) * scale for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"无法解析数值列表 {text!r}") from None


def _km_list(text):
    return _float_list(text, 1000.0)


def _ntn_points(text):
    points = []
    for item in text.split(","):
        try:
            h_km, aperture = item.split(":")
            points.append((float(h_km) * 1000.0, float(aperture)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"NTN 设计点应为 高度km:口径λ，得到 {item!r}") from None
    return points


def resolve_threads(value):
    """--threads 优先，其次环境变量 SKYLINK_THREADS，默认 1"""
    if value is None:
        raw = os.environ.get(THREADS_ENV)
        if raw is None:
            return 1
        try:
            value = int(raw)
        except ValueError:
            raise RangeError(THREADS_ENV, raw) from None
    if value < 1:
        raise RangeError("threads", value)
    return value


# ---------- 各子命令的执行逻辑，返回 (写出的文件, 摘要) ----------

def _cmd_run(cfg, params, ctx):
    results = run_drops(cfg, threads=ctx.threads, interference=params.get("interference", True))
    stats = aggregate_stats(results)
    logger.info("%d 次投放、%d 个样本：中位吞吐 %.2f Mbps，5%% 吞吐 %.2f Mbps，平均 SINR %.2f dB",
                len(results), stats.n_samples, stats.median_tput_mbps, stats.p5_tput_mbps, stats.mean_sinr_db)
    files = emit_outputs({"ue_results.csv": ue_results_frame(results)}, ctx.out_dir, ctx.force)
    return files, stats.to_dict()


def _cmd_sweep(cfg, params, ctx):
    path = os.path.join(ctx.out_dir, "sweep.csv")
    if not ctx.resume:
        for stale in (path, sweep_state_path(path)):
            if os.path.exists(stale):
                os.remove(stale)
    os.makedirs(ctx.out_dir, exist_ok=True)
    grid = run_sweep(cfg, params["altitudes_m"], params["apertures_wl"], threads=ctx.threads,
                     out_csv=path, resume=ctx.resume, progress=ctx.progress)
    if not os.path.exists(path):
        write_csv(grid.to_frame(), path, force=True)
    files = ["sweep.csv", "sweep_config.json"]
    summary = {"points": len(grid.stats)}
    if grid.stats:
        best, fit = best_apertures(grid)
        write_csv(best, os.path.join(ctx.out_dir, "sweep_best.csv"), force=True)
        files.append("sweep_best.csv")
        summary.update(fit_slope_wl_per_km=fit.slope_wl_per_km, fit_intercept_wl=fit.intercept_wl)
        logger.info("最优口径 ≈ %.3f·h_km + %.3f λ", fit.slope_wl_per_km, fit.intercept_wl)
    return files, summary


def _cmd_heatmap(cfg, params, ctx):
    analyzer = HeatmapAnalyzer(cfg, params["resolution_m"], params.get("extent_m"),
                               threads=ctx.threads, progress=ctx.progress)
    grid = analyzer.compute()
    hotspots = analyzer.hotspots()
    for _, row in hotspots.iterrows():
        logger.info("扇区 %d：干扰热点距视轴点 %.1f m，过量干扰使 SINR 下降 %.2f dB",
                    row["cell"], row["distance_m"], row["sinr_dip_db"])
    files = emit_outputs({"heatmap.csv": grid.to_frame(), "hotspots.csv": hotspots}, ctx.out_dir, ctx.force)
    summary = {"pixels": int(grid.n_pixels)}
    if len(hotspots):
        summary["max_sinr_dip_db"] = float(hotspots["sinr_dip_db"].max())
    return files, summary


def _cmd_compare(cfg, params, ctx):
    points = [tuple(p) for p in params.get("ntn_points", DEFAULT_NTN_POINTS)]
    table = compare(cfg, points, threads=ctx.threads, progress=ctx.progress)
    files = emit_outputs({"compare.csv": table}, ctx.out_dir, ctx.force)
    return files, {"scenarios": len(table)}


def _cmd_pattern(cfg, params, ctx):
    theta = np.round(np.arange(-90.0, 90.0 + 1e-9, params.get("step_deg", 0.1)), 6)
    if cfg.kind.is_ntn:
        gain = ReflectorAntenna.for_config(cfg).gain(theta)
    else:
        sector = SectorAntenna.for_config(cfg)
        if sector.steered:
            gain = tn_beam_gain(sector, (90.0, 0.0), (np.full_like(theta, 90.0), theta))
        else:
            gain = sector.sector_gain(90.0, theta)
    table = pd.DataFrame({"theta_deg": theta, "gain_dbi": gain})[PATTERN_COLUMNS]
    return emit_outputs({"pattern.csv": table}, ctx.out_dir, ctx.force), {}


def _cmd_layout(cfg, params, ctx):
    deployment = build_hex_layout(cfg, DropStreams(cfg.rng_seed, params.get("drop", 0))("layout"))
    sites, ues = layout_frames(deployment)
    return emit_outputs({"sites.csv": sites, "ues.csv": ues}, ctx.out_dir, ctx.force), {}


def _cmd_links(cfg, params, ctx):
    sim = DropSimulator(cfg, params.get("drop", 0))
    sim.compute()
    return emit_outputs({"links.csv": links_frame(sim.links)}, ctx.out_dir, ctx.force), {}


def _cmd_footprint(cfg, params, ctx):
    hpbw = {a: ReflectorAntenna(a, cfg.aperture_efficiency).hpbw_deg for a in params["apertures_wl"]}
    rows = [(a, h, hpbw[a], r) for a, h, r in footprints(params["altitudes_m"], hpbw)]
    table = pd.DataFrame(rows, columns=FOOTPRINT_COLUMNS)
    return emit_outputs({"footprints.csv": table}, ctx.out_dir, ctx.force), {}


COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "heatmap": _cmd_heatmap,
    "compare": _cmd_compare,
    "pattern": _cmd_pattern,
    "layout": _cmd_layout,
    "links": _cmd_links,
    "footprint": _cmd_footprint,
}


def execute(command, cfg, params, ctx):
    """
    执行一条子命令并写出 manifest.json

    参数
    ----------
    command : COMMANDS 中的子命令名
    cfg : ValidatedConfig
    params : 子命令参数（写入 manifest，replay 时原样使用）
    ctx : RunContext

    返回
    ----------
    RunManifest
    """
    for name in COMMAND_OUTPUTS[command]:
        if not (command == "sweep" and ctx.resume):
            ensure_writable(os.path.join(ctx.out_dir, name), ctx.force)
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    files, summary = COMMANDS[command](cfg, params, ctx)
    manifest = RunManifest(
        command=command,
        arguments=params,
        config=cfg.to_dict(),
        seed=cfg.rng_seed,
        version=__version__,
        started_at=started,
        wall_clock_s=round(time.perf_counter() - t0, 3),
        outputs=list(files),
        summary=summary,
    )
    write_manifest(manifest, ctx.out_dir)
    logger.info("%s 完成，用时 %.1f s，输出目录 %s", command, manifest.wall_clock_s, ctx.out_dir)
    return manifest


def load_scenario(args):
    """读取配置文件（若有）并应用命令行覆盖"""
    cfg = parse_config(args.config) if args.config else ScenarioConfig()
    overrides = {}
    if args.kind is not None:
        overrides.update(deployment_kind=DeploymentKind(args.kind),
                         carrier_hz=None, bandwidth_hz=None, tx_power_dbm=None)
    if args.seed is not None:
        overrides["rng_seed"] = args.seed
    if args.drops is not None:
        overrides["n_drops"] = args.drops
    if getattr(args, "altitude", None) is not None:
        overrides["h_ntn_m"] = args.altitude * 1000.0
    if getattr(args, "aperture", None) is not None:
        overrides["aperture_radius_wavelengths"] = args.aperture
    return validate_config(replace(cfg, **overrides))


def command_params(args):
    """从命令行参数中提取需要记录到 manifest 的子命令参数"""
    cmd = args.command
    if cmd == "run":
        return {"interference": not args.no_interference}
    if cmd == "sweep":
        return {"altitudes_m": args.altitudes, "apertures_wl": args.apertures}
    if cmd == "heatmap":
        return {"resolution_m": args.resolution, "extent_m": args.extent}
    if cmd == "compare":
        return {"ntn_points": [list(p) for p in args.ntn_points]}
    if cmd == "pattern":
        return {"step_deg": args.step}
    if cmd in ("layout", "links"):
        return {"drop": args.drop}
    if cmd == "footprint":
        return {"altitudes_m": args.altitudes, "apertures_wl": args.apertures}
    return {}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="输出目录（默认当前目录）")
    common.add_argument("--threads", type=int, default=None, help=f"并行进程数（默认取 {THREADS_ENV} 或 1）")
    common.add_argument("--force", action="store_true", help="允许覆盖已有输出")
    common.add_argument("-v", "--verbose", action="store_true", help="输出调试日志")
    common.add_argument("--quiet", action="store_true", help="只输出警告与错误，关闭进度条")

    scenario = argparse.ArgumentParser(add_help=False, parents=[common])
    scenario.add_argument("--config", default=None, help="JSON 配置文件")
    scenario.add_argument("--kind", choices=[k.value for k in DeploymentKind], default=None,
                          help="部署形态（覆盖配置文件，载频/带宽/功率恢复该形态的默认值）")
    scenario.add_argument("--seed", type=int, default=None, help="随机种子")
    scenario.add_argument("--drops", type=int, default=None, help="蒙特卡洛投放次数")

    design = argparse.ArgumentParser(add_help=False)
    design.add_argument("--altitude", type=float, default=None, help="NTN 平台高度（km）")
    design.add_argument("--aperture", type=float, default=None, help="反射面半径（波长）")

    parser = argparse.ArgumentParser(prog="skylink", description="地面与高空平台 5G 下行系统级仿真")
    parser.add_argument("--version", action="version", version=f"skylink {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[scenario, design], help="单一场景的多次投放")
    p.add_argument("--no-interference", action="store_true", help="关闭小区间干扰（SINR 退化为 SNR）")

    p = sub.add_parser("sweep", parents=[scenario], help="NTN 高度 × 口径扫描")
    p.add_argument("--altitudes", type=_km_list, default=list(DEFAULT_ALTITUDES_M), help="高度列表（km，逗号分隔）")
    p.add_argument("--apertures", type=_float_list, default=list(DEFAULT_APERTURES_WL), help="口径列表（λ）")
    p.add_argument("--resume", action="store_true", help="跳过 sweep.csv 中已完成的网格点")

    p = sub.add_parser("heatmap", parents=[scenario, design], help="干扰热力图与热点分析")
    p.add_argument("--resolution", type=float, default=DEFAULT_RESOLUTION_M, help="像素边长（m）")
    p.add_argument("--extent", type=float, default=None, help="网格边长（m，默认 2·ISD）")

    p = sub.add_parser("compare", parents=[scenario], help="TN4G / TN5G / NTN5G 对比")
    p.add_argument("--ntn-points", type=_ntn_points, default=[list(p) for p in DEFAULT_NTN_POINTS],
                   help="NTN 设计点，高度km:口径λ，逗号分隔")

    p = sub.add_parser("replay", parents=[common], help="按 manifest.json 重放一次运行")
    p.add_argument("manifest", help="manifest.json 或其所在目录")

    p = sub.add_parser("pattern", parents=[scenario, design], help="天线方向图切面")
    p.add_argument("--step", type=float, default=0.1, help="角度步长（度）")

    for name, text in (("layout", "站点与 UE 位置"), ("links", "逐链路大尺度状态")):
        p = sub.add_parser(name, parents=[scenario, design], help=text)
        p.add_argument("--drop", type=int, default=0, help="投放编号")

    p = sub.add_parser("footprint", parents=[scenario], help="波束覆盖半径表")
    p.add_argument("--altitudes", type=_km_list, default=list(DEFAULT_ALTITUDES_M), help="高度列表（km）")
    p.add_argument("--apertures", type=_float_list, default=list(DEFAULT_APERTURES_WL), help="口径列表（λ）")
    return parser


def _configure_logging(args):
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)
    try:
        ctx = RunContext(out_dir=args.out, force=args.force, threads=resolve_threads(args.threads),
                         progress=not args.quiet, resume=getattr(args, "resume", False))
        if args.command == "replay":
            recorded = load_manifest(args.manifest)
            cfg = config_from_dict(recorded.config)
            logger.info("重放 %s（种子 %d，版本 %s）", recorded.command, cfg.rng_seed, recorded.version)
            execute(recorded.command, cfg, recorded.arguments, ctx)
        else:
            execute(args.command, load_scenario(args), command_params(args), ctx)
    except SkylinkError as exc:
        logger.error("%s", exc)
        return 2
    except KeyboardInterrupt:
        logger.error("已中断")
        return 1
    except Exception:
        logger.exception("运行失败")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
