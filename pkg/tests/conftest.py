"""Shared fixtures and the acceptance-criteria summary."""

from __future__ import annotations

from collections import OrderedDict

import pytest

import synthetic

_criteria: "OrderedDict[str, dict]" = OrderedDict()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        cid, title = marker.args
        entry = _criteria.setdefault(str(cid), {"title": title, "tests": []})
        passed = report.outcome == "passed"
        detail = ""
        if not passed and report.longrepr is not None:
            crash = getattr(report.longrepr, "reprcrash", None)
            detail = crash.message.splitlines()[0] if crash is not None else str(report.longrepr).splitlines()[-1]
        entry["tests"].append((item.name, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid, entry in sorted(_criteria.items(), key=lambda kv: kv[0]):
        ok = all(p for _, p, _ in entry["tests"])
        tr.write_line(f"criterion {cid}: {'PASS' if ok else 'FAIL'} - {entry['title']}")
        for name, passed, detail in entry["tests"]:
            if not passed:
                tr.write_line(f"    {name}: {detail}")


@pytest.fixture(scope="session")
def small_pair():
    """A small train/test pair with label-specific vocabularies."""
    train = synthetic.generate(120, 12, 60, cardinality=2, tokens=15, seed=11)
    test = synthetic.generate(30, 12, 60, cardinality=2, tokens=15, seed=12, role="test")
    return train, test
