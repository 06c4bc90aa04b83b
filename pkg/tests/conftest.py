import os
from fractions import Fraction

import hypothesis
import pytest

from nashcode.instances import BINARY_CODEBOOK, binary_example_game, ternary_game

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_criteria = []


@pytest.fixture
def criterion():
    """Record one acceptance-criterion line for the terminal summary."""

    def record(number, ok, detail):
        _criteria.append((number, ok, detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_criteria, key=lambda c: c[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")


@pytest.fixture
def ternary():
    return ternary_game()


@pytest.fixture
def bsc_game():
    return binary_example_game(Fraction(1, 10))


@pytest.fixture
def four_code():
    return BINARY_CODEBOOK
