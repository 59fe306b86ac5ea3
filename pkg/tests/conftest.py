import pytest
from hypothesis import HealthCheck, settings

from _support import ACCEPTANCE

settings.register_profile("r1ce", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow,
                                                 HealthCheck.function_scoped_fixture])
settings.load_profile("r1ce")

CRITERIA = {
    1: "Kohn-Strang max-norm error at 45^4 with rc16",
    2: "xyz example value at the origin",
    3: "2-D level-set areas",
    4: "oracle equivalence",
    5: "scheme properties",
    6: "consistency order of the second difference",
    7: "laminates",
    8: "4-D volume trend",
}
_outcomes: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion covered by a test")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is not None and (report.when == "call" or report.outcome != "passed"):
        _outcomes.setdefault(marker, []).append((report.nodeid, report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        outcome.get_result().criterion = mark.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        runs = _outcomes.get(n)
        if not runs:
            tr.write_line(f"criterion {n}: NOT RUN  {title}")
            continue
        ok = all(o == "passed" for _, o in runs)
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
        for label, passed, detail in ACCEPTANCE.get(n, []):
            tr.write_line(f"    [{'ok' if passed else 'x '}] {label}: {detail}")
