import numpy as np
import pytest

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(name): gate criterion verified by this test")


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # pay the JIT cost once so timed tests measure the algorithms
    from hyla import kernels
    kernels.warmup()


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(12345))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    name = marker.args[0]
    if rep.when == "call":
        _ACCEPTANCE[name] = rep.outcome
    elif rep.when == "setup" and rep.outcome != "passed":
        _ACCEPTANCE[name] = rep.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance gate")
    for name, outcome in _ACCEPTANCE.items():
        word = {"passed": "PASS", "failed": "FAIL",
                "skipped": "SKIP"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"{word}  {name}")
