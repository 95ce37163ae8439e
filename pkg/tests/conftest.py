import pytest

from apnlab.field_core import FieldSpec

_criteria: dict[int, dict] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            num, title = m.args
            _criteria.setdefault(num, {"title": title, "outcomes": []})


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for num, entry in _criteria.items():
        if f"criterion_{num:02d}" in report.nodeid:
            entry["outcomes"].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        entry = _criteria[num]
        outs = entry["outcomes"]
        status = "PASS" if outs and all(o == "passed" for o in outs) else ("NOT RUN" if not outs else "FAIL")
        terminalreporter.write_line(f"criterion {num:2d}: {status}  {entry['title']}")


@pytest.fixture(scope="session")
def gf():
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = FieldSpec(n)
        return cache[n]

    return get
