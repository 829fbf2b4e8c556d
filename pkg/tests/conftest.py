"""Shared fixtures and the per-criterion pass/fail summary for the acceptance suite."""

from collections import defaultdict

import mpmath as mp
import pytest

_CRITERIA = defaultdict(list)


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[crit].append((report.nodeid, report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_CRITERIA):
        results = _CRITERIA[crit]
        failed = [nid for nid, outcome in results if outcome != "passed"]
        status = "PASS" if not failed else "FAIL"
        tr.write_line(f"criterion {crit:>2}: {status}  ({len(results) - len(failed)}/{len(results)} tests passed)")
        for nid in failed:
            tr.write_line(f"              failed: {nid}")


@pytest.fixture
def mpquad():
    """Independent 50-digit quadrature: ``mpquad(f, [a, b, ...])``."""

    def run(f, points, dps=50):
        with mp.workdps(dps):
            return float(mp.quad(f, points))

    return run
