import pathlib

import pytest

from understory import load_corpus, load_schema_file

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

# Filled by the acceptance tests; echoed after the run so the verdicts
# survive output capture.
ACCEPTANCE_VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


@pytest.fixture
def day_corpus():
    return load_corpus(fixture_path("day.events"))


@pytest.fixture
def morning_doc():
    return load_schema_file(fixture_path("morning.mps"))


@pytest.fixture
def pair_doc():
    return load_schema_file(fixture_path("pair.mps"))


@pytest.fixture
def pair_nolink_doc():
    return load_schema_file(fixture_path("pair_nolink.mps"))
