import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")
_outcomes: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    key = int(m.group(1))
    if report.when == "call" or report.failed:
        status = "PASS" if report.passed else "FAIL"
        if _outcomes.get(key, ("PASS",))[0] != "FAIL":
            _outcomes[key] = (status, m.group(2).replace("_", " "))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_outcomes):
        status, label = _outcomes[key]
        terminalreporter.write_line(f"criterion {key:2d}: {status}  {label}")
