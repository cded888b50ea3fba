import numpy as np
import pytest

from fairaudit import AuditTable

_acceptance = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): exit criterion reported in the summary")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    label = _LABELS.get(report.nodeid)
    if label:
        _acceptance.append((label, report.outcome))


_LABELS = {}


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("acceptance")
        if marker:
            _LABELS[item.nodeid] = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in sorted(_acceptance):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{verdict}] {label}")


HAND_ROWS = [
    (1, "A", 0.9), (1, "A", 0.3), (0, "A", 0.7), (0, "A", 0.2),
    (1, "B", 0.8), (1, "B", 0.6), (0, "B", 0.4), (0, "B", 0.1),
]


@pytest.fixture
def hand_table():
    """The 8-row hand-counted table; ``x`` marks each group's first two rows."""
    y, g, p = zip(*HAND_ROWS)
    return AuditTable.from_columns(y, g, p, {"x": [1, 1, 0, 0, 1, 1, 0, 0]})


def random_table(rng, n_min=4, n_max=50):
    """Random valid table with both groups present."""
    n = int(rng.integers(n_min, n_max + 1))
    while True:
        g = rng.integers(0, 2, size=n)
        if 0 < g.sum() < n:
            break
    y = rng.integers(0, 2, size=n)
    # mix continuous probs with exact ties to exercise the cutoff boundary
    p = rng.random(n)
    ties = rng.random(n) < 0.2
    p[ties] = rng.choice([0.0, 0.25, 0.5, 0.75, 1.0], size=int(ties.sum()))
    extra = rng.integers(0, 100, size=n).astype(float)
    return AuditTable(y, g, p, ("g1", "g2"), {"x": extra})


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
