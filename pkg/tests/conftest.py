import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


CRITERIA: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    CRITERIA[number] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        passed, detail = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
