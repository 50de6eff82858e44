import random

import pytest

from expeq import generators
from expeq.abelian import AbelianSignature
from expeq.freeprod import GroupSpec


@pytest.fixture
def zz():
    return generators.spec_z_z()


@pytest.fixture
def z6z():
    return generators.spec_z6_z()


@pytest.fixture
def z4z():
    return GroupSpec(
        [("C", AbelianSignature(0, (4,))), ("B", AbelianSignature(1))],
        [("c", "C", (1,)), ("b", "B", (1,))],
    )


@pytest.fixture
def rng():
    return random.Random(20240611)


def el(spec, text):
    return spec.element(text)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
