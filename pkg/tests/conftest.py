import sys
from pathlib import Path

import pytest

import qbx
from qbx.endpoint import LocalEngine
from qbx.model import load

sys.path.insert(0, str(Path(__file__).parent))

from helpers import catalog_for  # noqa: E402

DATA = Path(qbx.__file__).parent / "data"
FIXTURES = ("running_example", "lattice216", "shop")

# acceptance lines collected during the run, printed in the terminal summary
ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def running():
    return load(DATA / "running_example.json")


@pytest.fixture(scope="session")
def shop():
    return load(DATA / "shop.json")


@pytest.fixture(scope="session")
def lattice216():
    return load(DATA / "lattice216.json")


@pytest.fixture(scope="session", params=FIXTURES)
def fixture_bundle(request):
    return load(DATA / f"{request.param}.json")


@pytest.fixture(scope="session")
def running_catalog(running):
    return catalog_for(running)


@pytest.fixture(scope="session")
def shop_catalog(shop):
    return catalog_for(shop)


@pytest.fixture
def engine():
    return LocalEngine()


@pytest.fixture
def acceptance():
    def record(criterion: int, ok: bool, detail: str) -> str:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        ACCEPTANCE.append(line)
        print(line)
        return line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
