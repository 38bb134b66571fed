"""
确定性随机子流

每个随机量由 (种子, 投放编号, 用途, 可选的 UE/像素编号) 唯一确定，
与执行顺序、进程数无关。
"""
import numpy as np

STREAMS = {
    "layout": 0,
    "los": 1,
    "shadowing": 2,
    "fading": 3,
    "beams": 4,
    "pixel_los": 5,
    "pixel_shadowing": 6,
    "pixel_fading": 7,
    "activity": 8,
}


def substream(seed, drop_index, name, *keys):
    """返回 (seed, drop_index, name, *keys) 对应的独立 numpy Generator"""
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(drop_index), STREAMS[name], *map(int, keys)))
    return np.random.default_rng(seq)


class DropStreams:
    """一次投放的全部随机子流"""

    def __init__(self, seed, drop_index):
        self.seed = seed
        self.drop_index = drop_index

    def __call__(self, name, *keys):
        return substream(self.seed, self.drop_index, name, *keys)
