"""HTTP service: each endpoint wraps one orchestration command.

Validation problems answer 400 (or 422 from body validation); runtime
breakdowns answer 500. All handlers are synchronous because every command is
CPU- and subprocess-bound.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

import codeworlds
from codeworlds.bench.runner import (
    RunnerError,
    run_apps_eval,
    run_evaluate,
    run_plan,
    run_report,
    run_synthesize,
)
from codeworlds.llm.gateway import GatewayError
from codeworlds.sandbox.errors import ExecError
from codeworlds.service import schemas


def create_app() -> FastAPI:
    app = FastAPI(title="codeworlds", version=codeworlds.__version__)

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(RunnerError)
    async def _runner_error(request: Request, exc: RunnerError) -> JSONResponse:
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    @app.exception_handler(GatewayError)
    async def _gateway_error(request: Request, exc: GatewayError) -> JSONResponse:
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    @app.exception_handler(ExecError)
    async def _exec_error(request: Request, exc: ExecError) -> JSONResponse:
        return JSONResponse(status_code=500, content={"detail": f"{exc.error_class}: {exc.message}"})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=codeworlds.__version__)

    @app.post("/synthesize", response_model=schemas.SynthesizeResponse)
    def synthesize(request: schemas.SynthesizeRequest) -> schemas.SynthesizeResponse:
        summary = run_synthesize(
            env=request.env,
            problem=request.problem,
            method=request.method,
            budget=request.budget,
            seed=request.seed,
            backend=request.backend,
            ablation=request.ablation,
            workers=request.workers,
            out=request.out,
        )
        return schemas.SynthesizeResponse(**summary)

    @app.post("/evaluate", response_model=schemas.EvaluateResponse)
    def evaluate(request: schemas.EvaluateRequest) -> schemas.EvaluateResponse:
        summary = run_evaluate(
            env=request.env,
            problem=request.problem,
            program=request.program,
            workers=request.workers,
            out=request.out,
        )
        return schemas.EvaluateResponse(**summary)

    @app.post("/plan", response_model=schemas.PlanResponse)
    def plan(request: schemas.PlanRequest) -> schemas.PlanResponse:
        summary = run_plan(
            env=request.env,
            program=request.program,
            episodes=request.episodes,
            seed=request.seed,
            max_steps=request.max_steps,
            workers=request.workers,
            out=request.out,
        )
        return schemas.PlanResponse(**summary)

    @app.post("/apps-eval", response_model=schemas.AppsEvalResponse)
    def apps_eval(request: schemas.AppsEvalRequest) -> schemas.AppsEvalResponse:
        summary = run_apps_eval(
            problem=request.problem,
            method=request.method,
            budget=request.budget,
            seed=request.seed,
            backend=request.backend,
            ablation=request.ablation,
            workers=request.workers,
            out=request.out,
        )
        return schemas.AppsEvalResponse(**summary)

    @app.post("/report", response_model=schemas.ReportResponse)
    def report(request: schemas.ReportRequest) -> schemas.ReportResponse:
        summary = run_report(runs=request.runs, out=request.out)
        return schemas.ReportResponse(**summary)

    return app
