import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tilequipu import example  # noqa: E402
from tilequipu.filtration import FiltrationConfig, run_filtration  # noqa: E402


@pytest.fixture(scope="session")
def ex1():
    return example("ex1")


@pytest.fixture(scope="session")
def grid1():
    return example("grid1")


@pytest.fixture(scope="session")
def bad1():
    return example("bad1")


@pytest.fixture(scope="session")
def ex1_run(ex1):
    return run_filtration(ex1, FiltrationConfig(window=20))
