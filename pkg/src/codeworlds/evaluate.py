"""Program scoring: transition-prediction accuracy and unit-test evaluation."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Any, Optional, Sequence

from codeworlds.core.metrics import ToleranceConfig, match_transition, outputs_match
from codeworlds.core.types import (
    EnvTask,
    EvaluationReport,
    IOProblem,
    PredictionOutcome,
    UnitTestResult,
)
from codeworlds.sandbox.errors import ExecError


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "True" if value else "False"
    if isinstance(value, float) and value.is_integer():
        return str(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    return repr(value)


def format_error(error: ExecError) -> str:
    parts = [f"The program fails with the following {error.error_class} error:", "", str(error)]
    if error.trace:
        parts += ["", error.trace]
    return "\n".join(parts)


@dataclass(frozen=True)
class NodeEvaluation:
    """What one program scored and whether it is executable."""

    value: float
    is_buggy: bool
    error: Optional[ExecError] = None
    report: Optional[EvaluationReport] = None
    io_results: Optional[tuple[UnitTestResult, ...]] = None

    @property
    def perfect(self) -> bool:
        return not self.is_buggy and self.value >= 1.0


class TransitionEvaluator:
    """Scores candidate world models by replaying a recorded transition buffer."""

    mode = "cwm"

    def __init__(self, task: EnvTask, executor, tolerance: ToleranceConfig = ToleranceConfig()):
        self.task = task
        self.executor = executor
        self.tolerance = tolerance

    @property
    def description(self) -> str:
        return self.task.description

    def evaluate(self, source: str) -> NodeEvaluation:
        start = time.perf_counter()
        try:
            self.executor.load_program(source)
        except ExecError as err:
            return NodeEvaluation(value=0.0, is_buggy=True, error=err)
        items = [(t.s, t.a) for t in self.task.buffer]
        raw = self.executor.predict_batch(items)
        outcomes: list[PredictionOutcome] = []
        first_error: Optional[ExecError] = None
        for idx, (result, truth) in enumerate(zip(raw, self.task.buffer)):
            if result["ok"]:
                predicted = (result["s_next"], result["r"], result["d"])
                state_ok, reward_ok, done_ok = match_transition(
                    predicted, truth, self.tolerance, self.task.observation_space
                )
                outcomes.append(
                    PredictionOutcome(
                        index=idx,
                        status="ok",
                        state_match=state_ok,
                        reward_match=reward_ok,
                        done_match=done_ok,
                        predicted=predicted,
                    )
                )
            else:
                err: ExecError = result["error"]
                if first_error is None:
                    first_error = err
                outcomes.append(
                    PredictionOutcome(
                        index=idx,
                        status="error",
                        state_match=False,
                        reward_match=False,
                        done_match=False,
                        error_class=err.error_class,
                        error_message=err.message,
                    )
                )
        report = EvaluationReport.build(outcomes, time.perf_counter() - start)
        if first_error is not None:
            return NodeEvaluation(value=0.0, is_buggy=True, error=first_error, report=report)
        return NodeEvaluation(value=report.accuracy, is_buggy=False, report=report)

    def improve_context(self, evaluation: NodeEvaluation) -> dict[str, str]:
        """Render the first mispredicted transition for a refinement prompt."""
        report = evaluation.report
        if report is None or report.first_mismatch is None:
            raise ValueError("improve feedback requires a report with a mismatch")
        idx = report.first_mismatch
        truth = self.task.buffer[idx]
        outcome = report.outcomes[idx]
        if outcome.predicted is None:
            raise ValueError("improve feedback requires a healthy prediction")
        s_pred, r_pred, d_pred = outcome.predicted
        return {
            "INPUT": f"State: {format_value(truth.s)}\nAction: {format_value(truth.a)}",
            "OUTPUT": (
                f"Next state: {format_value(truth.s_next)}\n"
                f"Reward: {format_value(truth.r)}\n"
                f"Done: {format_value(truth.d)}"
            ),
            "PREDICTION": (
                f"Next state: {format_value(s_pred)}\n"
                f"Reward: {format_value(r_pred)}\n"
                f"Done: {format_value(d_pred)}"
            ),
        }


class IOEvaluator:
    """Scores stdin/stdout programs by the fraction of unit tests they pass."""

    mode = "io"

    def __init__(self, problem: IOProblem, executor, case_timeout: float = 2.0):
        self.problem = problem
        self.executor = executor
        self.case_timeout = case_timeout

    @property
    def description(self) -> str:
        return self.problem.statement

    def evaluate(self, source: str) -> NodeEvaluation:
        cases = self.problem.cases
        raw = self.executor.run_io(source, [c.stdin for c in cases], timeout=self.case_timeout)
        results: list[UnitTestResult] = []
        first_error: Optional[ExecError] = None
        for case, result in zip(cases, raw):
            if result["ok"]:
                actual = result["stdout"]
                if outputs_match(actual, case.expected_stdout):
                    results.append(UnitTestResult(status="passed", actual_stdout=actual))
                else:
                    results.append(UnitTestResult(status="wrong_output", actual_stdout=actual))
            else:
                err: ExecError = result["error"]
                if first_error is None:
                    first_error = err
                status = "timeout" if err.error_class == "timeout" else "error"
                results.append(
                    UnitTestResult(status=status, error_class=err.error_class, error_message=err.message)
                )
        passed = sum(1 for r in results if r.passed)
        fraction = passed / len(results)
        if first_error is not None:
            return NodeEvaluation(value=0.0, is_buggy=True, error=first_error, io_results=tuple(results))
        return NodeEvaluation(value=fraction, is_buggy=False, io_results=tuple(results))

    def improve_context(self, evaluation: NodeEvaluation) -> dict[str, str]:
        """Show the first failing feedback-eligible test (only the first half may be shown)."""
        if evaluation.io_results is None:
            raise ValueError("improve feedback requires unit test results")
        eligible = self.problem.improve_eligible
        chosen = 0
        for idx in range(len(eligible)):
            if not evaluation.io_results[idx].passed:
                chosen = idx
                break
        case = self.problem.cases[chosen]
        actual = evaluation.io_results[chosen].actual_stdout
        return {
            "INPUT": case.stdin,
            "OUTPUT": case.expected_stdout,
            "PREDICTION": actual,
        }


Evaluator = Any  # TransitionEvaluator | IOEvaluator
