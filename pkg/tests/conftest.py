from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lexlog import builtin_kb, fixture_case_facts, solve

from util import case_program, padded_goal


@pytest.fixture(scope="session")
def kb():
    return builtin_kb()


@pytest.fixture(scope="session")
def tailgating_program(kb):
    return case_program(kb, fixture_case_facts("tailgating"))


@pytest.fixture(scope="session")
def tailgating_result(kb, tailgating_program):
    goal, user_vars = padded_goal(kb, "BrokenLaw(P, X, T)")
    return solve(goal, tailgating_program, answer_vars=user_vars)
