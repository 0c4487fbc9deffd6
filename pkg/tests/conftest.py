from __future__ import annotations

import pytest

from eqcohom.grp import build_action, cyclic, trivial_action, trivial_group


def inversion_action(n: int):
    G = cyclic(n)
    return build_action(cyclic(2, "t"), G, {1: tuple(G.inv(x) for x in G.elements())})


def no_operators(G):
    return trivial_action(trivial_group(), G)


@pytest.fixture
def c3_inv():
    return inversion_action(3)


@pytest.fixture
def c2_plain():
    return no_operators(cyclic(2))


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
