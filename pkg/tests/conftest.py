import pytest

from nids.experiments import compare, load_desk_data

# criterion number -> (passed, summary); filled by the acceptance module
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def desk_data():
    return load_desk_data()


@pytest.fixture(scope="session")
def desk_comparison(desk_data):
    """Three seeds of matched-budget shallow vs deep runs on the bundled sample."""
    return compare(desk_data)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, summary = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {summary}")
