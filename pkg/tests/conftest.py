import random

import numpy as np
import pytest

from mds22.constructions import build_c1, build_c2
from mds22.gf import GF256, binary_field, prime_field


@pytest.fixture
def rng():
    return random.Random(20261018)


@pytest.fixture
def nprng():
    return np.random.default_rng(20261018)


@pytest.fixture(scope="session")
def gf5():
    return prime_field(5)


@pytest.fixture(scope="session")
def gf11():
    return prime_field(11)


@pytest.fixture(scope="session")
def gf13():
    return prime_field(13)


@pytest.fixture(scope="session")
def gf256():
    return GF256


@pytest.fixture(scope="session")
def c1_k4_gf13(gf13):
    return build_c1(4, gf13)


@pytest.fixture(scope="session")
def c2_k6_gf11(gf11):
    return build_c2(6, gf11)


@pytest.fixture(scope="session")
def c1_k4():
    return build_c1(4)


@pytest.fixture(scope="session")
def c2_k6():
    return build_c2(6)


def random_column(field, rng):
    from mds22.linalg import Mat
    return Mat.column(field, [rng.randrange(field.order) for _ in range(2)])


FIELDS_UNDER_TEST = [
    ("p", 2), ("p", 3), ("p", 5), ("p", 11), ("p", 13),
    ("b", 3), ("b", 4), ("b", 8),
]


def make_field(kind, v):
    return prime_field(v) if kind == "p" else binary_field(v)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    def record(line: str) -> None:
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
