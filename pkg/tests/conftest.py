import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gkmflag.rootsys import RootSystem


@pytest.fixture(scope="session")
def a1():
    return RootSystem("A", 1)


@pytest.fixture(scope="session")
def a2():
    return RootSystem("A", 2)


@pytest.fixture(scope="session")
def a3():
    return RootSystem("A", 3)


@pytest.fixture(scope="session")
def b2():
    return RootSystem("B", 2)


@pytest.fixture(scope="session")
def b3():
    return RootSystem("B", 3)


@pytest.fixture(scope="session")
def c2():
    return RootSystem("C", 2)


@pytest.fixture(scope="session")
def d3():
    return RootSystem("D", 3)
