"""
JSON 配置文件读写

文件为单个 JSON 对象，键名即 ScenarioConfig 的字段名；省略的字段取默认值，
未知键一律拒绝。
"""
import json
import re
from dataclasses import fields
from typing import get_args

from skylink.errors import ConfigParseError, UnknownKeyError
from skylink.scenario.config import DeploymentKind, ScenarioConfig, validate_config

_KEY_LINE = re.compile(r'^\s*[{,]?\s*"([^"]+)"\s*:')


def _base_type(tp):
    args = [a for a in get_args(tp) if a is not type(None)]
    return args[0] if args else tp


_FIELD_TYPES = {f.name: _base_type(f.type) for f in fields(ScenarioConfig)}
_NULLABLE = {f.name for f in fields(ScenarioConfig) if type(None) in get_args(f.type)}


def _key_lines(text):
    lines = {}
    for number, line in enumerate(text.splitlines(), start=1):
        match = _KEY_LINE.match(line)
        if match:
            lines.setdefault(match.group(1), number)
    return lines


def _reject_duplicates(pairs):
    data = {}
    for key, value in pairs:
        if key in data:
            raise ConfigParseError("重复的配置键", key=key)
        data[key] = value
    return data


def _coerce(name, value, line=None):
    ftype = _FIELD_TYPES[name]
    if value is None:
        if name in _NULLABLE:
            return None
        raise ConfigParseError("该字段不能为 null", line=line, key=name)
    if ftype is DeploymentKind:
        try:
            return DeploymentKind(value)
        except ValueError:
            raise ConfigParseError(f"未知部署形态 {value!r}", line=line, key=name) from None
    if ftype is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigParseError(f"需要整数，得到 {value!r}", line=line, key=name)
        return value
    if ftype is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigParseError(f"需要数值，得到 {value!r}", line=line, key=name)
        return float(value)
    if not isinstance(value, str):
        raise ConfigParseError(f"需要字符串，得到 {value!r}", line=line, key=name)
    return value


def config_from_dict(data, key_lines=None):
    """
    由字典构造并校验配置

    参数
    ----------
    data : dict，键为字段名
    key_lines : dict，可选，{键: 行号}，用于错误信息

    返回
    ----------
    ValidatedConfig
    """
    key_lines = key_lines or {}
    if not isinstance(data, dict):
        raise ConfigParseError("配置文件顶层必须是 JSON 对象")
    values = {}
    for key, value in data.items():
        if key not in _FIELD_TYPES:
            raise UnknownKeyError(key, line=key_lines.get(key))
        values[key] = _coerce(key, value, key_lines.get(key))
    return validate_config(ScenarioConfig(**values))


def parse_config(path):
    """
    读取 JSON 配置文件

    返回
    ----------
    ValidatedConfig

    异常
    ----------
    ConfigParseError : JSON 语法错误、类型错误或重复键（带行号/键名）
    UnknownKeyError : 出现 ScenarioConfig 之外的键
    RangeError / ConsistencyError : 字段值不合法
    """
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigParseError(f"无法读取配置文件 {path}: {exc}") from exc
    try:
        data = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"JSON 语法错误：{exc.msg}", line=exc.lineno) from None
    except ConfigParseError as exc:
        raise ConfigParseError("重复的配置键", line=_key_lines(text).get(exc.key), key=exc.key) from None
    return config_from_dict(data, _key_lines(text))


def dump_config(cfg, path):
    """把配置的全部字段写成 JSON，可被 parse_config 读回"""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, ensure_ascii=False)
        fh.write("\n")
    return path
