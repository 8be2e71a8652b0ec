"""Orchestration for the five commands: synthesize, evaluate, plan, apps-eval,
report. Each runs one experiment, persists its artifacts under a fresh run
directory with a manifest, and returns a JSON-ready summary.

Validation problems (bad arguments, malformed task dirs, missing artifacts)
raise ValueError/IngestError; unrecoverable runtime failures raise RunnerError.
"""

from __future__ import annotations

import json
import os
import shlex
import time
from pathlib import Path
from typing import Optional

from codeworlds.baselines import run_worldcoder, run_zero_shot
from codeworlds.bench.ingest import ingest_environment, ingest_io_problem
from codeworlds.bench.report import build_report, render_report_table, report_to_csv
from codeworlds.bench.runs import (
    RunManifest,
    backend_fingerprint,
    iter_manifests,
    new_run_dir,
    write_json_atomic,
    write_manifest,
    write_text_atomic,
)
from codeworlds.core.spaces import BoxSpace, DiscreteSpace
from codeworlds.envs.fixtures import FIXTURE_NAMES, make_fixture
from codeworlds.evaluate import IOEvaluator, TransitionEvaluator
from codeworlds.llm.gateway import BackendConfig, LlmGateway, MockScript, SamplingParams
from codeworlds.planners import CemConfig, CemPlanner, CwmEvaluation, MctsConfig, MctsPlanner, evaluate_cwm
from codeworlds.sandbox.client import SandboxLimits, WorkerClient
from codeworlds.sandbox.errors import ExecError
from codeworlds.sandbox.local import LocalExecutor
from codeworlds.search.config import ABLATIONS, SearchConfig, ablation_actions
from codeworlds.search.gif_mcts import PERFECT_VALUE, run_search
from codeworlds.search.stats import render_stats_table

METHODS = ("gif-mcts", "worldcoder", "zero-shot-cot")
WORKER_COMMAND_ENV = "CWM_WORKER_CMD"


class RunnerError(RuntimeError):
    """An experiment failed at runtime (gateway or sandbox breakdown)."""


def make_executor(workers: int = 0):
    """In-process execution by default; `workers >= 1` runs candidate programs
    in the external sandbox worker named by $CWM_WORKER_CMD."""
    if workers < 0:
        raise ValueError("workers must be >= 0")
    if workers == 0:
        return LocalExecutor()
    command = os.environ.get(WORKER_COMMAND_ENV, "").strip()
    if not command:
        raise ValueError(f"workers={workers} requires the {WORKER_COMMAND_ENV} environment variable")
    return WorkerClient(shlex.split(command), SandboxLimits())


def make_gateway(backend: str) -> LlmGateway:
    config = BackendConfig.from_spec(backend)
    script = MockScript.from_file(config.script_path) if config.kind == "mock" else None
    return LlmGateway(config, SamplingParams(), script=script)


def _close(executor) -> None:
    close = getattr(executor, "close", None)
    if close is not None:
        close()


def _search_config(budget: int, seed: int, ablation: Optional[str]) -> SearchConfig:
    if ablation is not None and ablation not in ABLATIONS:
        raise ValueError(f"unknown ablation {ablation!r}; choose from {', '.join(ABLATIONS)}")
    actions = ablation_actions(ablation) if ablation else ("generate", "improve", "fix")
    return SearchConfig(budget=budget, seed=seed, enabled_actions=actions)


def _task_kind(action_space) -> str:
    return "discrete" if isinstance(action_space, DiscreteSpace) else "continuous"


def _load_evaluator(env: Optional[str], problem: Optional[str], executor):
    if (env is None) == (problem is None):
        raise ValueError("exactly one of env/problem is required")
    if env is not None:
        task = ingest_environment(env)
        return task.name, _task_kind(task.action_space), TransitionEvaluator(task, executor), task
    prob = ingest_io_problem(problem)
    return prob.name, "io", IOEvaluator(prob, executor), prob


def _dispatch(method: str):
    table = {"gif-mcts": run_search, "worldcoder": run_worldcoder, "zero-shot-cot": run_zero_shot}
    if method not in table:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    return table[method]


def _synthesize(env, problem, method, budget, seed, backend, ablation, workers):
    """Run one synthesis experiment; returns everything needed for persistence."""
    if not backend:
        raise ValueError("backend is required (http:<url>#<model> or mock:<script>)")
    search = _dispatch(method)
    config = _search_config(budget, seed, ablation)
    gateway = make_gateway(backend)
    executor = make_executor(workers)
    try:
        task_name, kind, evaluator, task = _load_evaluator(env, problem, executor)
        started = time.perf_counter()
        program, trace = search(task, config, gateway, evaluator)
        wall = time.perf_counter() - started
    finally:
        _close(executor)
    return program, trace, task_name, kind, wall, gateway


def _persist_synthesis(out, command_label, program, trace, task_name, kind, wall, gateway, budget, seed, extra_results=None, extra_files=None):
    run_dir = new_run_dir(out, trace.method, task_name)
    write_text_atomic(run_dir / "program.txt", program.text + ("" if program.text.endswith("\n") or not program.text else "\n"))
    write_text_atomic(run_dir / "trace.json", trace.to_json_str() + "\n")
    write_text_atomic(run_dir / "stats.txt", render_stats_table(trace.stats) + "\n")
    artifacts = {"program": "program.txt", "trace": "trace.json", "stats": "stats.txt"}
    if extra_files:
        for label, (name, payload) in extra_files.items():
            write_json_atomic(run_dir / name, payload)
            artifacts[label] = name
    results = {
        "command": command_label,
        "best_value": trace.best_value,
        "accuracy": trace.best_value,
        "llm_calls_used": trace.llm_calls_used,
        "aborted": trace.aborted,
        "program_valid": program.valid,
    }
    if extra_results:
        results.update(extra_results)
    manifest = RunManifest(
        method=trace.method,
        task=task_name,
        task_kind=kind,
        budget=budget,
        seed=seed,
        backend_hash=backend_fingerprint(gateway.config.describe()),
        config=trace.config,
        wall_time_seconds=wall,
        artifacts=artifacts,
        results=results,
    )
    write_manifest(run_dir, manifest)
    return run_dir, results


def run_synthesize(
    env: Optional[str] = None,
    problem: Optional[str] = None,
    method: str = "gif-mcts",
    budget: int = 10,
    seed: int = 0,
    backend: str = "",
    ablation: Optional[str] = None,
    workers: int = 0,
    out: str = "runs",
) -> dict:
    program, trace, task_name, kind, wall, gateway = _synthesize(
        env, problem, method, budget, seed, backend, ablation, workers
    )
    run_dir, results = _persist_synthesis(
        out, "synthesize", program, trace, task_name, kind, wall, gateway, budget, seed
    )
    if trace.aborted and not program.valid:
        raise RunnerError(f"synthesis failed with no usable program ({trace.aborted}); artifacts in {run_dir}")
    return {
        "run_dir": str(run_dir),
        "method": trace.method,
        "task": task_name,
        "task_kind": kind,
        "best_value": trace.best_value,
        "llm_calls_used": trace.llm_calls_used,
        "aborted": trace.aborted,
        "program": program.text,
        "program_valid": program.valid,
        "stats": trace.stats,
    }


def run_apps_eval(
    problem: str,
    method: str = "gif-mcts",
    budget: int = 10,
    seed: int = 0,
    backend: str = "",
    ablation: Optional[str] = None,
    workers: int = 0,
    out: str = "runs",
) -> dict:
    """Synthesize against an input/output problem and score it strictly."""
    if not problem:
        raise ValueError("apps-eval requires a problem directory")
    program, trace, task_name, kind, wall, gateway = _synthesize(
        None, problem, method, budget, seed, backend, ablation, workers
    )
    solved_values = [e.value for e in trace.expansions if not e.is_buggy]
    strict = trace.best_value is not None and trace.best_value >= PERFECT_VALUE
    pass_at_budget = any(v >= PERFECT_VALUE for v in solved_values)
    eval_payload = {
        "problem": task_name,
        "strict": strict,
        "pass_at_budget": pass_at_budget,
        "fraction_passed": trace.best_value,
        "attempts": trace.llm_calls_used,
    }
    run_dir, results = _persist_synthesis(
        out,
        "apps-eval",
        program,
        trace,
        task_name,
        kind,
        wall,
        gateway,
        budget,
        seed,
        extra_results={"strict": strict, "pass_at_budget": pass_at_budget},
        extra_files={"eval": ("eval.json", eval_payload)},
    )
    if trace.aborted and not program.valid:
        raise RunnerError(f"apps-eval failed with no usable program ({trace.aborted}); artifacts in {run_dir}")
    return {
        "run_dir": str(run_dir),
        "problem": task_name,
        "method": trace.method,
        "strict": strict,
        "pass_at_budget": pass_at_budget,
        "fraction_passed": trace.best_value,
        "llm_calls_used": trace.llm_calls_used,
        "aborted": trace.aborted,
        "program": program.text,
    }


def _read_program(path: str) -> str:
    target = Path(path)
    if not target.is_file():
        raise ValueError(f"missing program artifact: {target}")
    return target.read_text(encoding="utf-8")


def run_evaluate(
    env: Optional[str] = None,
    problem: Optional[str] = None,
    program: str = "",
    workers: int = 0,
    out: str = "runs",
) -> dict:
    """Score an existing program against a task without any synthesis."""
    if not program:
        raise ValueError("evaluate requires a program file")
    text = _read_program(program)
    executor = make_executor(workers)
    try:
        task_name, kind, evaluator, _task = _load_evaluator(env, problem, executor)
        started = time.perf_counter()
        evaluation = evaluator.evaluate(text)
        wall = time.perf_counter() - started
    finally:
        _close(executor)

    if kind == "io":
        strict = all(r.passed for r in evaluation.io_results or ())
        eval_payload = {
            "mode": "io",
            "task": task_name,
            "value": evaluation.value,
            "strict": strict,
            "buggy": evaluation.is_buggy,
            "error": evaluation.error.to_json() if evaluation.error else None,
            "cases": [r.to_json() for r in evaluation.io_results or ()],
        }
        results = {"command": "evaluate", "accuracy": evaluation.value, "strict": strict, "buggy": evaluation.is_buggy}
    else:
        eval_payload = {
            "mode": "cwm",
            "task": task_name,
            "value": evaluation.value,
            "buggy": evaluation.is_buggy,
            "error": evaluation.error.to_json() if evaluation.error else None,
            "report": evaluation.report.to_json() if evaluation.report else None,
        }
        results = {"command": "evaluate", "accuracy": evaluation.value, "buggy": evaluation.is_buggy}

    run_dir = new_run_dir(out, "evaluate", task_name)
    write_text_atomic(run_dir / "program.txt", text)
    write_json_atomic(run_dir / "eval.json", eval_payload)
    manifest = RunManifest(
        method="evaluate",
        task=task_name,
        task_kind=kind,
        budget=None,
        seed=None,
        backend_hash=None,
        wall_time_seconds=wall,
        artifacts={"program": "program.txt", "eval": "eval.json"},
        results=results,
    )
    write_manifest(run_dir, manifest)
    summary = dict(eval_payload)
    summary["run_dir"] = str(run_dir)
    return summary


def run_plan(
    env: str = "",
    program: str = "",
    episodes: int = 10,
    seed: int = 0,
    max_steps: int = 100,
    workers: int = 0,
    out: str = "runs",
) -> dict:
    """Plan with a synthesized model inside the real environment and report
    the return normalized between random and fully informed planning."""
    if not env:
        raise ValueError("plan requires an environment directory")
    if not program:
        raise ValueError("plan requires a program file")
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    text = _read_program(program)
    task = ingest_environment(env)
    if task.name not in FIXTURE_NAMES:
        raise ValueError(
            f"no built-in dynamics for task {task.name!r}; planning needs one of: {', '.join(FIXTURE_NAMES)}"
        )
    kind = _task_kind(task.action_space)

    if isinstance(task.action_space, DiscreteSpace):
        def planner_factory(model, planner_seed):
            return MctsPlanner(model, task.action_space, MctsConfig(), seed=planner_seed)
    elif isinstance(task.action_space, BoxSpace):
        def planner_factory(model, planner_seed):
            return CemPlanner(model, task.action_space, CemConfig(), seed=planner_seed)
    else:  # pragma: no cover - space union is closed
        raise ValueError(f"unsupported action space for planning: {task.action_space!r}")

    executor = make_executor(workers)
    started = time.perf_counter()
    try:
        try:
            executor.load_program(text)
        except ExecError as exc:
            evaluation = CwmEvaluation(model_unusable=True, episodes=episodes)
            load_error = exc
        else:
            load_error = None
            evaluation = evaluate_cwm(
                env_factory=lambda: make_fixture(task.name),
                model=executor,
                planner_factory=planner_factory,
                action_space=task.action_space,
                episodes=episodes,
                base_seed=seed,
                max_steps=max_steps,
            )
    finally:
        _close(executor)
    wall = time.perf_counter() - started

    eval_payload = evaluation.to_json()
    eval_payload["task"] = task.name
    eval_payload["load_error"] = load_error.to_json() if load_error else None
    episode_rows = [
        {
            "episode": i,
            "model_return": evaluation.model_returns[i] if i < len(evaluation.model_returns) else None,
            "true_return": evaluation.true_returns[i] if i < len(evaluation.true_returns) else None,
            "random_return": evaluation.random_returns[i] if i < len(evaluation.random_returns) else None,
        }
        for i in range(len(evaluation.model_returns))
    ]
    run_dir = new_run_dir(out, "plan", task.name)
    write_text_atomic(run_dir / "program.txt", text)
    write_json_atomic(run_dir / "eval.json", eval_payload)
    write_text_atomic(
        run_dir / "episodes.jsonl",
        "".join(_json_line(row) for row in episode_rows),
    )
    manifest = RunManifest(
        method="plan",
        task=task.name,
        task_kind=kind,
        budget=None,
        seed=seed,
        backend_hash=None,
        config={"episodes": episodes, "max_steps": max_steps},
        wall_time_seconds=wall,
        artifacts={"program": "program.txt", "eval": "eval.json", "episodes": "episodes.jsonl"},
        results={
            "command": "plan",
            "normalized_return": evaluation.normalized_return,
            "return_sem": evaluation.sem,
            "model_unusable": evaluation.model_unusable,
        },
    )
    write_manifest(run_dir, manifest)
    return {
        "run_dir": str(run_dir),
        "task": task.name,
        "task_kind": kind,
        "normalized_return": evaluation.normalized_return,
        "return_sem": evaluation.sem,
        "model_unusable": evaluation.model_unusable,
        "episodes": episodes,
        "model_returns": evaluation.model_returns,
        "true_returns": evaluation.true_returns,
        "random_returns": evaluation.random_returns,
    }


def _json_line(row: dict) -> str:
    return json.dumps(row, sort_keys=True) + "\n"


def run_report(runs: str = "runs", out: Optional[str] = None) -> dict:
    """Aggregate every non-report manifest under `runs` into a results table."""
    manifests = [m for _, m in iter_manifests(runs) if m.method != "report"]
    report = build_report(manifests)
    table = render_report_table(report)
    run_dir = new_run_dir(out or runs, "report", "all")
    write_json_atomic(run_dir / "report.json", report)
    write_text_atomic(run_dir / "report.csv", report_to_csv(report))
    write_text_atomic(run_dir / "report.txt", table + "\n")
    manifest = RunManifest(
        method="report",
        task="all",
        task_kind="report",
        budget=None,
        seed=None,
        backend_hash=None,
        wall_time_seconds=0.0,
        artifacts={"json": "report.json", "csv": "report.csv", "table": "report.txt"},
        results={"command": "report", "rows": len(report["rows"])},
    )
    write_manifest(run_dir, manifest)
    return {
        "run_dir": str(run_dir),
        "rows": report["rows"],
        "aggregates": report["aggregates"],
        "table": table,
    }
