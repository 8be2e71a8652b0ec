"""Scoring rules: transition matching, prediction accuracy, normalized returns."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from codeworlds.core.spaces import DiscreteSpace, Space
from codeworlds.core.types import PredictionOutcome, Transition, UnitTestResult


@dataclass(frozen=True)
class ToleranceConfig:
    """Elementwise tolerance for continuous comparisons: |x - y| <= atol + rtol * |y|."""

    atol: float = 1e-4
    rtol: float = 1e-4


def _as_vector(value: Any) -> Optional[np.ndarray]:
    """Coerce a scalar or flat sequence of numbers to a float vector, else None."""
    if isinstance(value, (bool, np.bool_)):
        return None
    if isinstance(value, (int, float, np.integer, np.floating)):
        return np.asarray([float(value)])
    if isinstance(value, (list, tuple, np.ndarray)):
        arr = np.asarray(value)
        if arr.ndim != 1 or arr.size == 0:
            return None
        if not np.issubdtype(arr.dtype, np.number) or np.issubdtype(arr.dtype, np.bool_):
            return None
        return arr.astype(float)
    return None


def values_close(predicted: Any, truth: Any, tol: ToleranceConfig) -> bool:
    """Continuous match under the tolerance rule; shape mismatches never match."""
    p = _as_vector(predicted)
    t = _as_vector(truth)
    if p is None or t is None or p.shape != t.shape:
        return False
    return bool(np.all(np.abs(p - t) <= tol.atol + tol.rtol * np.abs(t)))


def _discrete_equal(predicted: Any, truth: Any) -> bool:
    if isinstance(predicted, (bool, np.bool_)):
        return False
    if isinstance(predicted, (int, float, np.integer, np.floating)):
        return float(predicted) == float(truth)
    # A one-element vector counts as the scalar it wraps.
    if isinstance(predicted, (list, tuple, np.ndarray)) and len(predicted) == 1:
        return _discrete_equal(predicted[0], truth)
    return False


def match_transition(
    predicted: tuple[Any, Any, Any],
    truth: Transition,
    tol: ToleranceConfig,
    observation_space: Optional[Space] = None,
) -> tuple[bool, bool, bool]:
    """Compare a predicted (s_next, r, d) against the recorded transition.

    Continuous states and rewards use the tolerance rule; discrete states and
    the done flag must match exactly.
    """
    s_pred, r_pred, d_pred = predicted
    discrete = (
        isinstance(observation_space, DiscreteSpace)
        if observation_space is not None
        else isinstance(truth.s_next, (int, np.integer)) and not isinstance(truth.s_next, bool)
    )
    if discrete:
        state_match = _discrete_equal(s_pred, truth.s_next)
    else:
        state_match = values_close(s_pred, truth.s_next, tol)
    reward_match = values_close(r_pred, truth.r, tol) if _as_vector(r_pred) is not None else False
    if isinstance(d_pred, (bool, np.bool_)):
        done_match = bool(d_pred) == truth.d
    else:
        done_match = False
    return state_match, reward_match, done_match


def compute_accuracy(outcomes: Sequence[PredictionOutcome]) -> float:
    """Mean over transitions of (state + reward + done matches) / 3."""
    if not outcomes:
        raise ValueError("cannot compute accuracy of an empty outcome list")
    total = 0.0
    for out in outcomes:
        total += (int(out.state_match) + int(out.reward_match) + int(out.done_match)) / 3.0
    return total / len(outcomes)


def normalized_return(model_return: float, true_return: float, random_return: float) -> float:
    """Scale a policy return so random scores 0 and the true environment scores 1."""
    denom = true_return - random_return
    if denom == 0:
        raise ValueError("degenerate normalization: true and random returns are equal")
    return (model_return - random_return) / denom


def strict_accuracy(results: Sequence[UnitTestResult]) -> bool:
    """A problem counts as solved only when every unit test passes."""
    if not results:
        raise ValueError("cannot judge an empty unit test result list")
    return all(res.passed for res in results)


def pass_at_budget(attempt_solved: Sequence[bool]) -> bool:
    """True when any attempt within the call budget solved the problem."""
    return any(attempt_solved)


def normalize_stdout(text: str) -> str:
    """Strip trailing whitespace per line and trailing blank lines before comparing."""
    lines = [line.rstrip() for line in text.split("\n")]
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines)


def outputs_match(actual: str, expected: str) -> bool:
    return normalize_stdout(actual) == normalize_stdout(expected)
