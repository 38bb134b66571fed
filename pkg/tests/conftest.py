import pytest


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="运行耗时的蒙特卡洛验收测试")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: 耗时的蒙特卡洛验收测试，需要 --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="需要 --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
