from codeworlds.core.spaces import BoxSpace, DiscreteSpace, Space, SpaceError, space_from_json, space_to_json
from codeworlds.core.types import (
    EnvTask,
    EvaluationReport,
    IOProblem,
    PredictionOutcome,
    ProgramSource,
    ReplayBuffer,
    Transition,
    UnitTestCase,
    UnitTestResult,
)
from codeworlds.core.metrics import (
    ToleranceConfig,
    compute_accuracy,
    match_transition,
    normalize_stdout,
    normalized_return,
    outputs_match,
    pass_at_budget,
    strict_accuracy,
)

__all__ = [
    "BoxSpace",
    "DiscreteSpace",
    "Space",
    "SpaceError",
    "space_from_json",
    "space_to_json",
    "EnvTask",
    "EvaluationReport",
    "IOProblem",
    "PredictionOutcome",
    "ProgramSource",
    "ReplayBuffer",
    "Transition",
    "UnitTestCase",
    "UnitTestResult",
    "ToleranceConfig",
    "compute_accuracy",
    "match_transition",
    "normalize_stdout",
    "normalized_return",
    "outputs_match",
    "pass_at_budget",
    "strict_accuracy",
]
