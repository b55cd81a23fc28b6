import sys

import pytest

from zerogap.functional import AmplifierConfig, assemble


@pytest.fixture(scope="session")
def published_functional():
    return assemble(AmplifierConfig.published())


@pytest.fixture(scope="session")
def trivial_functional():
    return assemble(AmplifierConfig(0, 1, 0))



def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
