import json
import logging
import os
import tempfile
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List

from skylink import __version__
from skylink.errors import ConfigParseError, OutputError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


@dataclass
class RunManifest:
    """
    一次运行的记录，与输出文件写在同一目录

    command / arguments 足以在 replay 时重放同一条命令；
    config 为校验后的完整配置快照。
    """
    command: str
    arguments: Dict[str, Any]
    config: Dict[str, Any]
    seed: int
    version: str = __version__
    started_at: str = ""
    wall_clock_s: float = 0.0
    outputs: List[str] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigParseError(f"manifest 字段不完整或多余：{exc}") from None


def write_json(data, path):
    """原子写出 JSON 文件（先写临时文件再 os.replace），返回 path"""
    out_dir = os.path.dirname(path) or "."
    try:
        os.makedirs(out_dir, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=".skylink-", suffix=".json", dir=out_dir)
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(data, fh, indent=2, ensure_ascii=False)
            fh.write("\n")
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except OSError as exc:
        raise OutputError(f"无法写出 {path}: {exc}") from exc
    logger.debug("已写出 %s", path)
    return path


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigParseError(f"无法读取 {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{os.path.basename(path)} JSON 语法错误：{exc.msg}", line=exc.lineno) from None


def write_manifest(manifest, out_dir):
    """
    原子写出 manifest.json

    返回
    ----------
    str: manifest 路径
    """
    return write_json(manifest.to_dict(), os.path.join(out_dir, MANIFEST_NAME))


def load_manifest(path):
    """读取 manifest.json；path 也可以是其所在目录"""
    if os.path.isdir(path):
        path = os.path.join(path, MANIFEST_NAME)
    return RunManifest.from_dict(read_json(path))
