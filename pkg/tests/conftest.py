import pytest

from symforge.report import reference_instance


@pytest.fixture(scope="session")
def ref():
    inst = reference_instance()
    inst.certify()
    return inst


def pytest_configure(config):
    config.acceptance_results = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "acceptance_results", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
