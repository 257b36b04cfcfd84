import os

import pytest
from hypothesis import HealthCheck, settings

from infsubst.sequence import EventuallyPeriodicSequence, ThueMorseSequence

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def ones():
    return EventuallyPeriodicSequence([], [1])


@pytest.fixture
def two_ones():
    return EventuallyPeriodicSequence([2], [1])


@pytest.fixture
def thue_morse():
    return ThueMorseSequence()


def standard_sequences():
    """Five sequences used across tests: constant, constant length, Thue-Morse, and two with zeros."""
    return [
        EventuallyPeriodicSequence([], [1]),
        EventuallyPeriodicSequence([2], [1]),
        ThueMorseSequence(),
        EventuallyPeriodicSequence([3], [0, 1]),
        EventuallyPeriodicSequence([1], [0, 2, 1]),
    ]


# ---------------------------------------------------------------------------
# acceptance summary: one line per criterion, printed at the end of the run

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE[number] = (title, report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, outcome, duration = _ACCEPTANCE[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {title}  ({duration:.2f} s)")
