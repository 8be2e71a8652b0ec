"""Integration between the orchestrator's worker client and the real
subprocess worker, including crash containment and the runner's
worker-backed execution path."""

from __future__ import annotations

import os
import sys

import pytest

from support import FIXTURES, REPO_ROOT

from codeworlds.bench.runner import run_evaluate
from codeworlds.sandbox.client import SandboxLimits, WorkerClient
from codeworlds.sandbox.errors import ExecError

WORKER_SRC = REPO_ROOT / "worker" / "src"

BUSY_LOOP = (
    "class Environment:\n"
    "    def set_state(self, state):\n"
    "        pass\n"
    "    def step(self, action):\n"
    "        while True:\n"
    "            pass\n"
)


def _worker_command() -> list[str]:
    return [sys.executable, "-m", "cwm_worker"]


def _worker_path_env() -> dict:
    return {"PYTHONPATH": str(WORKER_SRC) + os.pathsep + os.environ.get("PYTHONPATH", "")}


@pytest.fixture
def client():
    handle = WorkerClient(_worker_command(), env=_worker_path_env())
    yield handle
    handle.close()


class TestOperations:
    def test_transitions_and_plans(self, client, lineworld_solution):
        client.load_program(lineworld_solution)
        assert client.step_from(2, 1) == (3, 0.0, False)

        batch = client.predict_batch([(8, 1), (0, 0)])
        assert batch[0] == {"ok": True, "s_next": 9, "r": 1.0, "d": True}
        assert batch[1] == {"ok": True, "s_next": 0, "r": 0.0, "d": False}

        steps = client.run_plan(0, [1] * 15)
        assert len(steps) == 9
        assert steps[-1] == (9, 1.0, True)

    def test_io_programs(self, client):
        results = client.run_io("n = int(input())\nprint(2 * n)\n", ["2\n", "21\n"])
        assert results == [{"ok": True, "stdout": "4\n"}, {"ok": True, "stdout": "42\n"}]

    def test_load_errors_surface_as_classified_failures(self, client):
        with pytest.raises(ExecError) as err:
            client.load_program("class Environment(\n")
        assert err.value.error_class == "syntax"
        with pytest.raises(ExecError) as err:
            client.step_from(0, 1)
        assert err.value.error_class == "protocol"


class TestContainment:
    def test_dead_worker_reports_resource_not_crash(self, client, lineworld_solution):
        client.load_program(lineworld_solution)
        client._proc.kill()
        client._proc.wait(timeout=5)
        with pytest.raises(ExecError) as err:
            client.step_from(0, 1)
        assert err.value.error_class == "resource"
        assert not client.alive

        replacement = WorkerClient(_worker_command(), env=_worker_path_env())
        try:
            replacement.load_program(lineworld_solution)
            assert replacement.step_from(0, 1) == (1, 0.0, False)
        finally:
            replacement.close()

    def test_runaway_step_times_out_within_grace(self, lineworld_solution):
        limits = SandboxLimits(cpu_seconds_per_call=0.5, batch_wall_seconds=2.0)
        handle = WorkerClient(_worker_command(), limits=limits, env=_worker_path_env())
        try:
            handle.load_program(BUSY_LOOP)
            with pytest.raises(ExecError) as err:
                handle.step_from(0, 1)
            assert err.value.error_class == "timeout"
            # The worker classified the overrun itself and keeps serving.
            assert handle.alive
            handle.load_program(lineworld_solution)
            assert handle.step_from(0, 1) == (1, 0.0, False)
        finally:
            handle.close()


class TestRunnerIntegration:
    def test_evaluate_through_worker_backend(self, tmp_path, monkeypatch, lineworld_solution):
        program = tmp_path / "program.py"
        program.write_text(lineworld_solution)
        monkeypatch.setenv("CWM_WORKER_CMD", f"{sys.executable} -m cwm_worker")
        monkeypatch.setenv(
            "PYTHONPATH", str(WORKER_SRC) + os.pathsep + os.environ.get("PYTHONPATH", "")
        )
        summary = run_evaluate(
            env=str(FIXTURES / "lineworld"),
            program=str(program),
            workers=1,
            out=str(tmp_path / "runs"),
        )
        assert summary["value"] == 1.0
        assert summary["buggy"] is False
