"""HTTP service: request validation, error mapping, and endpoint behavior."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

import codeworlds
from support import BROKEN_SYNTAX, FIXTURES, fenced
from codeworlds.service.app import create_app

LINEWORLD = str(FIXTURES / "lineworld")
DOUBLER = str(FIXTURES / "doubler")
MOCK_LINEWORLD = f"mock:{FIXTURES / 'mock_lineworld.json'}"

DOUBLER_SOLUTION = "n = int(input())\nprint(2 * n)\n"


@pytest.fixture(scope="module")
def client() -> TestClient:
    return TestClient(create_app())


def synth_body(tmp_path: Path, **overrides) -> dict:
    body = {
        "env": LINEWORLD,
        "backend": MOCK_LINEWORLD,
        "budget": 10,
        "seed": 0,
        "out": str(tmp_path / "runs"),
    }
    body.update(overrides)
    return body


class TestHealth:
    def test_reports_ok_and_version(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json() == {"status": "ok", "version": codeworlds.__version__}


class TestSynthesizeEndpoint:
    def test_happy_path(self, client, tmp_path, lineworld_solution):
        response = client.post("/synthesize", json=synth_body(tmp_path))
        assert response.status_code == 200
        body = response.json()
        assert body["best_value"] == pytest.approx(1.0)
        assert body["llm_calls_used"] == 3
        assert body["method"] == "gif-mcts"
        assert body["task"] == "lineworld"
        assert body["program"] == lineworld_solution.rstrip("\n")
        assert body["program_valid"] is True
        assert body["stats"]["best_node_id"] is not None
        assert Path(body["run_dir"]).is_dir()

    def test_missing_backend_is_422(self, client, tmp_path):
        body = synth_body(tmp_path)
        del body["backend"]
        assert client.post("/synthesize", json=body).status_code == 422

    def test_both_targets_is_422(self, client, tmp_path):
        response = client.post("/synthesize", json=synth_body(tmp_path, problem=DOUBLER))
        assert response.status_code == 422
        assert "exactly one of env/problem" in json.dumps(response.json())

    def test_neither_target_is_422(self, client, tmp_path):
        body = synth_body(tmp_path)
        del body["env"]
        assert client.post("/synthesize", json=body).status_code == 422

    def test_unknown_method_is_422(self, client, tmp_path):
        response = client.post("/synthesize", json=synth_body(tmp_path, method="dreamer"))
        assert response.status_code == 422
        assert "unknown method" in json.dumps(response.json())

    def test_unknown_ablation_is_422(self, client, tmp_path):
        response = client.post("/synthesize", json=synth_body(tmp_path, ablation="no-magic"))
        assert response.status_code == 422

    def test_zero_budget_is_422(self, client, tmp_path):
        assert client.post("/synthesize", json=synth_body(tmp_path, budget=0)).status_code == 422

    def test_bad_task_directory_is_400(self, client, tmp_path):
        response = client.post(
            "/synthesize", json=synth_body(tmp_path, env=str(tmp_path / "absent"))
        )
        assert response.status_code == 400
        assert "no such directory" in response.json()["detail"]

    def test_failed_synthesis_is_500(self, client, tmp_path):
        script = tmp_path / "script.json"
        script.write_text(json.dumps([fenced(BROKEN_SYNTAX)]), encoding="utf-8")
        response = client.post(
            "/synthesize", json=synth_body(tmp_path, backend=f"mock:{script}", budget=3)
        )
        assert response.status_code == 500
        assert "artifacts in" in response.json()["detail"]


class TestEvaluateEndpoint:
    def test_environment_program(self, client, tmp_path, lineworld_solution):
        program = tmp_path / "prog.py"
        program.write_text(lineworld_solution, encoding="utf-8")
        response = client.post(
            "/evaluate",
            json={"env": LINEWORLD, "program": str(program), "out": str(tmp_path / "runs")},
        )
        assert response.status_code == 200
        body = response.json()
        assert body["mode"] == "cwm"
        assert body["value"] == pytest.approx(1.0)
        assert body["buggy"] is False

    def test_io_program(self, client, tmp_path):
        program = tmp_path / "prog.py"
        program.write_text(DOUBLER_SOLUTION, encoding="utf-8")
        response = client.post(
            "/evaluate",
            json={"problem": DOUBLER, "program": str(program), "out": str(tmp_path / "runs")},
        )
        assert response.status_code == 200
        body = response.json()
        assert body["mode"] == "io"
        assert body["strict"] is True
        assert len(body["cases"]) == 6

    def test_both_targets_is_422(self, client, tmp_path):
        response = client.post(
            "/evaluate",
            json={"env": LINEWORLD, "problem": DOUBLER, "program": "x", "out": str(tmp_path)},
        )
        assert response.status_code == 422

    def test_missing_program_artifact_is_400(self, client, tmp_path):
        response = client.post(
            "/evaluate",
            json={"env": LINEWORLD, "program": str(tmp_path / "ghost.py"), "out": str(tmp_path)},
        )
        assert response.status_code == 400
        assert "missing program artifact" in response.json()["detail"]


class TestPlanEndpoint:
    def test_happy_path(self, client, tmp_path, lineworld_solution):
        program = tmp_path / "prog.py"
        program.write_text(lineworld_solution, encoding="utf-8")
        response = client.post(
            "/plan",
            json={
                "env": LINEWORLD,
                "program": str(program),
                "episodes": 2,
                "seed": 0,
                "max_steps": 30,
                "out": str(tmp_path / "runs"),
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["normalized_return"] == pytest.approx(1.0)
        assert body["model_unusable"] is False
        assert len(body["model_returns"]) == 2

    def test_zero_episodes_is_422(self, client, tmp_path):
        response = client.post(
            "/plan",
            json={"env": LINEWORLD, "program": "x", "episodes": 0, "out": str(tmp_path)},
        )
        assert response.status_code == 422

    def test_unknown_dynamics_is_400(self, client, tmp_path):
        from test_ingest import make_env_dir

        env_dir = make_env_dir(tmp_path / "walk")
        program = tmp_path / "prog.py"
        program.write_text("class Environment:\n    pass\n", encoding="utf-8")
        response = client.post(
            "/plan",
            json={"env": str(env_dir), "program": str(program), "out": str(tmp_path / "runs")},
        )
        assert response.status_code == 400
        assert "no built-in dynamics" in response.json()["detail"]


class TestAppsEvalEndpoint:
    def test_happy_path(self, client, tmp_path):
        script = tmp_path / "script.json"
        script.write_text(json.dumps([fenced(DOUBLER_SOLUTION)]), encoding="utf-8")
        response = client.post(
            "/apps-eval",
            json={
                "problem": DOUBLER,
                "backend": f"mock:{script}",
                "budget": 5,
                "seed": 0,
                "out": str(tmp_path / "runs"),
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["strict"] is True
        assert body["pass_at_budget"] is True
        assert body["fraction_passed"] == pytest.approx(1.0)

    def test_missing_problem_is_422(self, client, tmp_path):
        response = client.post(
            "/apps-eval", json={"backend": "mock:x", "out": str(tmp_path)}
        )
        assert response.status_code == 422


class TestReportEndpoint:
    def test_aggregates_runs(self, client, tmp_path):
        out = str(tmp_path / "runs")
        assert client.post("/synthesize", json=synth_body(tmp_path)).status_code == 200
        response = client.post("/report", json={"runs": out})
        assert response.status_code == 200
        body = response.json()
        assert len(body["rows"]) == 1
        assert body["rows"][0]["method"] == "gif-mcts"
        assert "gif-mcts" in body["table"]

    def test_empty_root(self, client, tmp_path):
        response = client.post(
            "/report",
            json={"runs": str(tmp_path / "none"), "out": str(tmp_path / "reports")},
        )
        assert response.status_code == 200
        assert response.json()["rows"] == []
