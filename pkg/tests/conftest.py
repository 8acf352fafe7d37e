import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    failed = report.failed
    if report.when == "call" or (failed and report.when == "setup"):
        details = [v for k, v in item.user_properties if k == "detail"]
        _criteria[number] = (title, "FAIL" if failed else "PASS", details)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status, details = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
        for d in details:
            terminalreporter.write_line(f"    {d}")
