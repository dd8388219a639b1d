"""Prints one PASS/FAIL line per acceptance criterion after the run."""

import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")
_results = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2))
    detail = dict(report.user_properties).get("detail", "")
    if report.when == "call" or report.failed or report.skipped:
        prev = _results.get(key)
        if prev is None or prev[0] == "PASS":
            outcome = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
            _results[key] = (outcome, detail)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), (outcome, detail) in sorted(_results.items()):
        line = f"criterion {num:2d} {name.replace('_', ' ')}: {outcome}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
