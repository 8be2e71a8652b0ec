"""Pytest fixtures for the worker suite; the shared plumbing lives in harness.py."""

from __future__ import annotations

import pytest

from harness import WorkerProcess


@pytest.fixture
def worker():
    with WorkerProcess() as w:
        yield w
