import json
import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def mc_oracle():
    return json.loads((FIXTURES / "mc_oracle.json").read_text())


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
