"""Shared fixtures: benchmark tasks, evaluators, and fixture paths."""

from __future__ import annotations

from pathlib import Path

import pytest

from codeworlds.bench.ingest import ingest_environment, ingest_io_problem
from codeworlds.evaluate import IOEvaluator, TransitionEvaluator
from codeworlds.sandbox.local import LocalExecutor
from support import FIXTURES


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def lineworld_task():
    return ingest_environment(FIXTURES / "lineworld")


@pytest.fixture(scope="session")
def minicliff_task():
    return ingest_environment(FIXTURES / "minicliff")


@pytest.fixture(scope="session")
def doubler_problem():
    return ingest_io_problem(FIXTURES / "doubler")


@pytest.fixture(scope="session")
def lineworld_solution() -> str:
    return (FIXTURES / "lineworld" / "solution.py").read_text()


@pytest.fixture(scope="session")
def minicliff_solution() -> str:
    return (FIXTURES / "minicliff" / "solution.py").read_text()


@pytest.fixture
def lineworld_evaluator(lineworld_task):
    return TransitionEvaluator(lineworld_task, LocalExecutor())


@pytest.fixture
def minicliff_evaluator(minicliff_task):
    return TransitionEvaluator(minicliff_task, LocalExecutor())


@pytest.fixture
def doubler_evaluator(doubler_problem):
    return IOEvaluator(doubler_problem, LocalExecutor())
