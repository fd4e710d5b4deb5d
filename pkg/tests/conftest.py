import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from privcache.common_info import joint_from_direct  # noqa: E402
from privcache.config import example_path, load_scenario  # noqa: E402

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

EX2_P_C = [Fraction(1, 8), Fraction(1, 4), Fraction(3, 8), Fraction(1, 8), Fraction(1, 16), Fraction(1, 16)]
EX2_P_X_GIVEN_C = [[1, 1, 1, 0, 0, 0], [0, 0, 0, 1, 1, 1]]


@pytest.fixture(scope="session")
def ex1():
    return load_scenario(example_path("example1"))


@pytest.fixture(scope="session")
def ex2():
    return load_scenario(example_path("example2"))


@pytest.fixture(scope="session")
def ex2_joint():
    return joint_from_direct(EX2_P_C, EX2_P_X_GIVEN_C)


# acceptance summary: one PASS/FAIL line per criterion, printed after the run
_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    number, title = mark.args
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "tests": 0})
    if rep.when == "call":
        entry["tests"] += 1
    if rep.failed or rep.skipped:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        status = "PASS" if e["ok"] and e["tests"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {e['title']} ({e['tests']} checks)")
