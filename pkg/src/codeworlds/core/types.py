"""Core data types: transitions, tasks, prediction outcomes and program records."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from codeworlds.core.spaces import Space, SpaceError

State = Any  # int for discrete spaces, tuple[float, ...] for box spaces
Action = Any


@dataclass(frozen=True)
class Transition:
    """One observed environment step: state, action, reward, next state, done."""

    s: State
    a: Action
    r: float
    s_next: State
    d: bool

    def validate(self, observation_space: Space, action_space: Space, *, where: str = "transition") -> None:
        if not observation_space.contains(self.s):
            raise SpaceError(f"{where}: field 's' value {self.s!r} not in observation space")
        if not observation_space.contains(self.s_next):
            raise SpaceError(f"{where}: field 's_next' value {self.s_next!r} not in observation space")
        if not action_space.contains(self.a):
            raise SpaceError(f"{where}: field 'a' value {self.a!r} not in action space")
        if not isinstance(self.r, (int, float)) or isinstance(self.r, bool):
            raise SpaceError(f"{where}: field 'r' must be a number, got {self.r!r}")
        if not isinstance(self.d, bool):
            raise SpaceError(f"{where}: field 'd' must be a boolean, got {self.d!r}")

    def to_json(self) -> dict:
        return {"s": self.s, "a": self.a, "r": self.r, "s_next": self.s_next, "d": self.d}


@dataclass(frozen=True)
class ReplayBuffer:
    """An ordered collection of transitions collected from one environment."""

    transitions: tuple[Transition, ...]
    source: str = field(default="", compare=False)  # provenance only, not identity

    def __len__(self) -> int:
        return len(self.transitions)

    def __iter__(self):
        return iter(self.transitions)

    def __getitem__(self, idx: int) -> Transition:
        return self.transitions[idx]


@dataclass(frozen=True)
class EnvTask:
    """A world-model synthesis task: a described environment plus recorded transitions."""

    name: str
    description: str
    observation_space: Space
    action_space: Space
    buffer: ReplayBuffer

    def __post_init__(self) -> None:
        if not self.description.strip():
            raise ValueError(f"task {self.name!r}: description must be non-empty")


@dataclass(frozen=True)
class UnitTestCase:
    """A stdin/stdout check for an input/output programming problem."""

    stdin: str
    expected_stdout: str


@dataclass(frozen=True)
class UnitTestResult:
    """Outcome of one unit test: passed, wrong_output, error or timeout."""

    status: str  # passed | wrong_output | error | timeout
    actual_stdout: str = ""
    error_class: str = ""
    error_message: str = ""

    _STATUSES = ("passed", "wrong_output", "error", "timeout")

    def __post_init__(self) -> None:
        if self.status not in self._STATUSES:
            raise ValueError(f"unknown unit test status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status == "passed"

    @property
    def is_execution_failure(self) -> bool:
        return self.status in ("error", "timeout")

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "actual_stdout": self.actual_stdout,
            "error_class": self.error_class,
            "error_message": self.error_message,
        }


@dataclass(frozen=True)
class IOProblem:
    """A stdin/stdout programming problem with unit tests.

    Only the first ceil(len(cases)/2) cases may be shown back to the model as
    refinement feedback; all cases count for scoring.
    """

    name: str
    statement: str
    cases: tuple[UnitTestCase, ...]

    def __post_init__(self) -> None:
        if not self.statement.strip():
            raise ValueError(f"problem {self.name!r}: statement must be non-empty")
        if not self.cases:
            raise ValueError(f"problem {self.name!r}: needs at least one test case")

    @property
    def improve_eligible(self) -> tuple[UnitTestCase, ...]:
        count = (len(self.cases) + 1) // 2
        return self.cases[:count]


@dataclass(frozen=True)
class PredictionOutcome:
    """Result of predicting one buffer transition with a candidate model.

    An error outcome always carries all-false match flags so it weighs zero in
    the accuracy aggregate.
    """

    index: int
    status: str  # ok | error
    state_match: bool
    reward_match: bool
    done_match: bool
    predicted: Optional[tuple[State, float, bool]] = None
    error_class: str = ""
    error_message: str = ""

    def __post_init__(self) -> None:
        if self.status not in ("ok", "error"):
            raise ValueError(f"unknown prediction status {self.status!r}")
        if self.status == "error" and (self.state_match or self.reward_match or self.done_match):
            raise ValueError("error outcomes must carry all-false match flags")

    @property
    def full_match(self) -> bool:
        return self.state_match and self.reward_match and self.done_match

    def to_json(self) -> dict:
        payload: dict = {
            "index": self.index,
            "status": self.status,
            "state_match": self.state_match,
            "reward_match": self.reward_match,
            "done_match": self.done_match,
        }
        if self.predicted is not None:
            s, r, d = self.predicted
            payload["predicted"] = {"s_next": s, "r": r, "d": d}
        if self.status == "error":
            payload["error_class"] = self.error_class
            payload["error_message"] = self.error_message
        return payload


@dataclass(frozen=True)
class EvaluationReport:
    """Per-transition outcomes plus the aggregate accuracy for one program."""

    outcomes: tuple[PredictionOutcome, ...]
    accuracy: float
    first_mismatch: Optional[int]
    wall_time: float

    @classmethod
    def build(cls, outcomes: Sequence[PredictionOutcome], wall_time: float) -> "EvaluationReport":
        from codeworlds.core.metrics import compute_accuracy  # local import avoids a cycle

        outs = tuple(outcomes)
        accuracy = compute_accuracy(outs)
        first_mismatch = None
        for out in outs:
            if not out.full_match:
                first_mismatch = out.index
                break
        return cls(outcomes=outs, accuracy=accuracy, first_mismatch=first_mismatch, wall_time=wall_time)

    def to_json(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "first_mismatch": self.first_mismatch,
            "n_transitions": len(self.outcomes),
            "wall_time": self.wall_time,
            "outcomes": [o.to_json() for o in self.outcomes],
        }


@dataclass(frozen=True)
class ProgramSource:
    """A synthesized program with its lineage in the search tree."""

    text: str
    state_lines: tuple[str, ...] = ()
    rollout_lines: tuple[str, ...] = ()
    node_id: Optional[int] = None
    parent_id: Optional[int] = None
    action: str = ""
    valid: bool = True

    def to_json(self) -> dict:
        return {
            "text": self.text,
            "node_id": self.node_id,
            "parent_id": self.parent_id,
            "action": self.action,
            "valid": self.valid,
        }
