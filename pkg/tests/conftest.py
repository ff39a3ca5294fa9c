import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gsdact.interpretation import parse_interpretation  # noqa: E402
from gsdact.parser import parse_action, parse_formula  # noqa: E402

DATA = Path(__file__).resolve().parent.parent / "data" / "projects"


def load(name: str) -> str:
    return (DATA / name).read_text()


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def i1():
    return parse_interpretation(load("i1.gsd"))


@pytest.fixture(scope="session")
def k1():
    return parse_formula(load("k1.kb"))


@pytest.fixture(scope="session")
def kg():
    return parse_formula(load("kg.kb"))


@pytest.fixture(scope="session")
def a1():
    return parse_action(load("a1.act"))


@pytest.fixture(scope="session")
def a1p():
    return parse_action(load("a1p.act"))


@pytest.fixture(scope="session")
def a2():
    return parse_action(load("a2.act"))


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)
