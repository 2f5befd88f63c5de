import numpy as np
import pytest

from wucb.env import build_synthetic

_ACCEPTANCE: list[tuple[int, str, bool, str]] = []


@pytest.fixture
def acceptance():
    """Record one criterion outcome; the terminal summary prints them all."""

    def record(number: int, title: str, ok: bool, detail: str = "") -> None:
        _ACCEPTANCE.append((number, title, bool(ok), detail))
        assert ok, f"criterion {number} ({title}) failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_ACCEPTANCE):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:2d}. {title} -- {detail}")


@pytest.fixture(scope="session")
def synth5():
    return build_synthetic(5)


@pytest.fixture(scope="session")
def synth10():
    return build_synthetic(10)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run long-horizon tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="long-horizon run; use --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
