"""Request and response bodies for the HTTP service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field, model_validator

from codeworlds.bench.runner import METHODS
from codeworlds.search.config import ABLATIONS


class TaskTarget(BaseModel):
    """Exactly one of `env` (environment dir) or `problem` (problem dir)."""

    env: Optional[str] = None
    problem: Optional[str] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.env is None) == (self.problem is None):
            raise ValueError("exactly one of env/problem is required")
        return self


class SynthesizeRequest(TaskTarget):
    method: str = "gif-mcts"
    budget: int = Field(default=10, ge=1)
    seed: int = 0
    backend: str
    ablation: Optional[str] = None
    workers: int = Field(default=0, ge=0)
    out: str = "runs"

    @model_validator(mode="after")
    def _known_names(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.ablation is not None and self.ablation not in ABLATIONS:
            raise ValueError(f"unknown ablation {self.ablation!r}; choose from {', '.join(ABLATIONS)}")
        return self


class SynthesizeResponse(BaseModel):
    run_dir: str
    method: str
    task: str
    task_kind: str
    best_value: Optional[float] = None
    llm_calls_used: int
    aborted: Optional[str] = None
    program: str
    program_valid: bool
    stats: dict


class EvaluateRequest(TaskTarget):
    program: str
    workers: int = Field(default=0, ge=0)
    out: str = "runs"


class EvaluateResponse(BaseModel):
    run_dir: str
    mode: str
    task: str
    value: float
    buggy: bool
    strict: Optional[bool] = None
    error: Optional[dict] = None
    report: Optional[dict] = None
    cases: Optional[list] = None


class PlanRequest(BaseModel):
    env: str
    program: str
    episodes: int = Field(default=10, ge=1)
    seed: int = 0
    max_steps: int = Field(default=100, ge=1)
    workers: int = Field(default=0, ge=0)
    out: str = "runs"


class PlanResponse(BaseModel):
    run_dir: str
    task: str
    task_kind: str
    normalized_return: float
    return_sem: float
    model_unusable: bool
    episodes: int
    model_returns: list[float]
    true_returns: list[float]
    random_returns: list[float]


class AppsEvalRequest(BaseModel):
    problem: str
    method: str = "gif-mcts"
    budget: int = Field(default=10, ge=1)
    seed: int = 0
    backend: str
    ablation: Optional[str] = None
    workers: int = Field(default=0, ge=0)
    out: str = "runs"

    @model_validator(mode="after")
    def _known_names(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.ablation is not None and self.ablation not in ABLATIONS:
            raise ValueError(f"unknown ablation {self.ablation!r}; choose from {', '.join(ABLATIONS)}")
        return self


class AppsEvalResponse(BaseModel):
    run_dir: str
    problem: str
    method: str
    strict: bool
    pass_at_budget: bool
    fraction_passed: Optional[float] = None
    llm_calls_used: int
    aborted: Optional[str] = None
    program: str


class ReportRequest(BaseModel):
    runs: str = "runs"
    out: Optional[str] = None


class ReportResponse(BaseModel):
    run_dir: str
    rows: list[dict]
    aggregates: list[dict]
    table: str


class HealthResponse(BaseModel):
    status: str
    version: str
