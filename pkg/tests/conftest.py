import os

import pytest

from gendermt.corpus import load_corpus

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")

# Filled by test_acceptance.py, printed at the end of the run.
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def fixture_path(name):
    return os.path.join(FIXTURES, name)


@pytest.fixture(scope="session")
def reference_corpus():
    return load_corpus(fixture_path("paper.jsonl"))


@pytest.fixture(scope="session")
def examples_corpus():
    return load_corpus(fixture_path("examples.jsonl"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0][1:])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}  {detail}")
