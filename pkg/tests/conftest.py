from __future__ import annotations

import time
from collections import defaultdict

import numpy as np
import pytest

from oedegrade import vqa

ENSEMBLE_SEEDS = range(20)

_criterion_of: dict[str, int] = {}
_outcomes: dict[int, list[tuple[str, str]]] = defaultdict(list)


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _criterion_of[item.nodeid] = int(mark.args[0])


def pytest_runtest_logreport(report):
    crit = _criterion_of.get(report.nodeid)
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes[crit].append((report.nodeid, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_outcomes):
        results = _outcomes[crit]
        failed = [nid.split("::")[-1] for nid, outcome in results if outcome != "passed"]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {crit}: {status} ({len(results) - len(failed)}/{len(results)} checks)"
        if failed:
            line += "  failing: " + ", ".join(failed)
        tr.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240615)


@pytest.fixture(scope="session")
def ensemble():
    """Twenty default protocol runs (seeds 0..19) and the wall time they took."""
    start = time.perf_counter()
    traces = [vqa.run_protocol(vqa.ProtocolConfig(seed=s)) for s in ENSEMBLE_SEEDS]
    return traces, time.perf_counter() - start
