"""Collects outcomes of tests marked ``criterion`` and prints one line per criterion."""

from collections import defaultdict

import pytest

_outcomes = defaultdict(list)
_titles = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    _titles[number] = title
    if report.when == "call" or report.outcome != "passed":
        _outcomes[number].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        results = _outcomes[number]
        if all(r == "passed" for r in results):
            status = "PASS"
        elif any(r == "failed" for r in results):
            status = "FAIL"
        else:
            status = "SKIP"
        terminalreporter.write_line(f"AC{number:<2} {status}  {_titles[number]} ({len(results)} checks)")
