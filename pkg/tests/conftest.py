import re

_results: dict[str, str] = {}


def pytest_runtest_logreport(report):
    match = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not match:
        return
    key = f"{int(match.group(1)):2d} {match.group(2)}"
    if report.failed:
        _results[key] = "FAIL"
    elif report.when == "call" and key not in _results:
        _results[key] = "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_results):
        terminalreporter.write_line(f"[{_results[key]}] criterion {key}")
