import pytest

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid or "criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        key = report.nodeid.split("::")[-1]
        _ACCEPTANCE[key] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: int(k.split("_")[2])):
        verdict = "PASS" if _ACCEPTANCE[key] == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {key}")


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(20240611)
