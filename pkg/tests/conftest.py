import functools

import pytest

from qcodelab import codes

_ACCEPTANCE: list[tuple[str, str, str]] = []


@functools.lru_cache(maxsize=None)
def _cached_code(name):
    return codes.builtin_code(name)


@pytest.fixture
def code():
    """Builtin code factory; codes are built once per session."""
    return _cached_code


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "acceptance" not in report.keywords:
        return
    doc = dict(report.user_properties).get("criterion")
    if doc is None:
        return
    _ACCEPTANCE.append((doc, "PASS" if report.passed else "FAIL", report.nodeid))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for doc, verdict, _ in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{verdict}  {doc}")
