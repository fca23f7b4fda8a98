from fractions import Fraction

import pytest

ACCEPTANCE_LINES = []


def record(criterion: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


RADEMACHER = [Fraction(1)] * 12
GAUSSIAN = [Fraction(1), Fraction(3), Fraction(15), Fraction(105), Fraction(945), Fraction(10395),
            Fraction(135135), Fraction(2027025)]


@pytest.fixture
def rademacher_exact():
    return list(RADEMACHER)


@pytest.fixture
def gaussian_exact():
    return list(GAUSSIAN)
