import pytest

from dualpred import available_backends

_acceptance_results: list[tuple[str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(criterion, title): exit criterion reported in the summary"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    criterion, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.skipped):
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        _acceptance_results.append((criterion, title, status))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, title, status in sorted(_acceptance_results):
        terminalreporter.write_line(f"{criterion:<4} {status:<5} {title}")


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param
