import os

from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_criteria = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.outcome != "passed":
        _criteria.setdefault(name, report.outcome)
        if report.outcome != "passed":
            _criteria[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda s: int(s.split("_")[2])):
        number = int(name.split("_")[2])
        title = name.split("_", 3)[3].replace("_", " ")
        mark = "PASS" if _criteria[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} [{mark}] {title}")
