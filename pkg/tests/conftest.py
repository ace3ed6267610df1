import pytest
from hypothesis import settings

# fixed example sequences keep the suite reproducible run to run
settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")

_acceptance = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_acceptance] = {}


@pytest.fixture
def acceptance(request):
    """``record(number, passed, detail)`` stores one line for the summary."""
    store = request.config.stash[_acceptance]

    def record(number, passed, detail):
        store[number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_acceptance, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        passed, detail = store[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
