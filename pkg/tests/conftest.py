import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

_LINES: dict[int, str] = {}


def pytest_runtest_logreport(report):
    """Acceptance tests tag themselves with record_property("criterion", n)."""
    props = dict(report.user_properties)
    num = props.get("criterion")
    if num is None or report.when == "teardown" or (report.when == "setup" and report.passed):
        return
    if report.passed:
        _LINES[num] = f"criterion {num:2d} PASS: {props.get('detail', '')}"
    else:
        last = (report.longreprtext.strip().splitlines() or [""])[-1]
        _LINES[num] = f"criterion {num:2d} FAIL: {props.get('detail') or last}"


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_LINES):
        terminalreporter.write_line(_LINES[num])


@pytest.fixture
def criterion(record_property):
    """criterion(n) tags the test; criterion.detail(text) attaches the summary text."""

    class Tag:
        def __call__(self, n):
            record_property("criterion", n)

        def detail(self, text):
            record_property("detail", text)
            print(text)

    return Tag()
