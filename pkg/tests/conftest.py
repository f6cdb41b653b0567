import functools

import pytest

from sautperm.search import build_context

ACCEPTANCE_LINES: dict[int, str] = {}


@functools.lru_cache(maxsize=None)
def context(n: int):
    return build_context(n)


@pytest.fixture(scope="session")
def ctx3():
    return context(3)


@pytest.fixture(scope="session")
def ctx4():
    return context(4)


@pytest.fixture(scope="session")
def ctx5():
    return context(5)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
