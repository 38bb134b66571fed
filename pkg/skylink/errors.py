"""
skylink 统一异常层次

所有仿真相关异常都继承自 SkylinkError，CLI 据此区分“输入/模型错误”（退出码 2）
与其它意外故障（退出码 1）。数值类异常同时继承 ValueError，便于调用方按惯例捕获。
"""


class SkylinkError(Exception):
    """skylink 所有异常的基类"""


class RangeError(SkylinkError, ValueError):
    """参数超出允许范围（field 指出出错的字段名）"""

    def __init__(self, field, value, message=None):
        self.field = field
        self.value = value
        super().__init__(message or f"参数 {field}={value!r} 超出允许范围")


class ConsistencyError(SkylinkError, ValueError):
    """参数之间互相矛盾，或计算所需的中间状态缺失"""


class DomainError(SkylinkError, ValueError):
    """数学函数的定义域错误（例如仰角 ≤ 0、高度 ≤ 0）"""


class DegenerateLinkError(SkylinkError, ValueError):
    """发射端与 UE 重合，链路几何无定义"""


class EmptyInputError(SkylinkError, ValueError):
    """需要非空输入的统计/映射函数收到了空序列"""


class ResolutionError(SkylinkError, ValueError):
    """热力图像素数超过配置的上限"""


class ConfigParseError(SkylinkError, ValueError):
    """配置文件无法解析，line/key 给出上下文"""

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"行 {line}")
        if key is not None:
            where.append(f"键 {key!r}")
        suffix = f"（{', '.join(where)}）" if where else ""
        super().__init__(f"{message}{suffix}")


class UnknownKeyError(ConfigParseError):
    """配置文件中出现未知键（通常是拼写错误）"""

    def __init__(self, key, line=None):
        super().__init__("未知配置键", line=line, key=key)


class OutputError(SkylinkError, OSError):
    """结果文件写出失败，或目标已存在且未指定 --force"""
