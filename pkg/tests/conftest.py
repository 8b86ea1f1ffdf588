import pytest

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties.append(("criterion", m.args))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        outcome = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
        prev = _results.get(crit)
        # one criterion may span several tests; any failure wins, then skip
        rank = {"FAIL": 2, "SKIP": 1, "PASS": 0}
        if prev is None or rank[outcome] > rank[prev[0]]:
            reason = ""
            if report.skipped and isinstance(report.longrepr, tuple):
                reason = report.longrepr[2]
            _results[crit] = (outcome, reason)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), (outcome, reason) in sorted(_results.items()):
        line = f"criterion {number}: {outcome}  {title}"
        if reason:
            line += f"  ({reason})"
        terminalreporter.write_line(line)
