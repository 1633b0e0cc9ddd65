"""Session fixtures: validated sequences for the frozen instances and
solved results cached once per run, plus a terminal summary section that
repeats the acceptance verdict lines."""

from __future__ import annotations

import pytest

import golden
from tcmp.moments import validate_sequence
from tcmp.solver import solve

_acceptance_lines: list[str] = []


@pytest.fixture
def acceptance():
    """Recorder for one acceptance-criterion verdict line."""

    def record(num: int, description: str, ok: bool):
        _acceptance_lines.append(
            f"criterion {num}: {'PASS' if ok else 'FAIL'}  {description}"
        )

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ref_seq():
    return validate_sequence(golden.REF_TABLE, 5)


@pytest.fixture(scope="session")
def rank_one_seq():
    mu = golden.rank_one_measure()
    return golden.measure_sequence(mu.atoms, mu.weights)


@pytest.fixture(scope="session")
def rank_two_seq():
    return golden.measure_sequence(
        golden.RANK_TWO_ATOMS, golden.RANK_TWO_WEIGHTS
    )


@pytest.fixture(scope="session")
def generic_eight_seq():
    mu = golden.generic_eight_measure()
    return golden.measure_sequence(mu.atoms, mu.weights)


@pytest.fixture(scope="session")
def variety_seq():
    return golden.measure_sequence(golden.VARIETY_ATOMS, golden.VARIETY_WEIGHTS)


@pytest.fixture(scope="session")
def fallback_seq():
    return golden.measure_sequence(golden.FALLBACK_ATOMS, golden.FALLBACK_WEIGHTS)


@pytest.fixture(scope="session")
def rank_one_solution(rank_one_seq):
    mu, report = solve(rank_one_seq)
    return rank_one_seq, mu, report


@pytest.fixture(scope="session")
def rank_two_solution(rank_two_seq):
    mu, report = solve(rank_two_seq)
    return rank_two_seq, mu, report


@pytest.fixture(scope="session")
def generic_eight_solution(generic_eight_seq):
    mu, report = solve(generic_eight_seq)
    return generic_eight_seq, mu, report


@pytest.fixture(scope="session")
def variety_solution(variety_seq):
    mu, report = solve(variety_seq)
    return variety_seq, mu, report


@pytest.fixture(scope="session")
def fallback_solution(fallback_seq):
    mu, report = solve(fallback_seq)
    return fallback_seq, mu, report


@pytest.fixture(scope="session")
def degenerate_seq():
    return golden.edge_sequence(golden.DEGENERATE_FREE)


@pytest.fixture(scope="session")
def unsupported_seq():
    return golden.edge_sequence(golden.UNSUPPORTED_FREE)


@pytest.fixture(scope="session")
def rank_two_no_root_seq():
    return golden.edge_sequence(golden.RANK_TWO_NO_ROOT_FREE)


@pytest.fixture(scope="session")
def rank_one_no_root_seq():
    return golden.edge_sequence(golden.RANK_ONE_NO_ROOT_FREE)
