"""Command-line client for the service.

Every subcommand builds a JSON request and posts it to the HTTP API — by
default against an in-process instance of the service, or against a remote
one when --server is given. Exit codes: 0 success, 1 runtime failure,
2 usage or validation error.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from typing import Optional

import httpx

from codeworlds.bench.runner import METHODS
from codeworlds.search.config import ABLATIONS

REQUEST_TIMEOUT = 600.0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cwm",
        description="Synthesize, evaluate and plan with executable world models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", default="runs", help="root directory for run artifacts")
        p.add_argument("--workers", type=int, default=0, help="sandbox workers (0 = in-process execution)")
        p.add_argument("--server", default=None, help="remote service URL (default: run in-process)")

    def add_synthesis_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--method", choices=METHODS, default="gif-mcts")
        p.add_argument("--budget", type=int, default=10, help="language model call budget")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--backend", required=True, help="http:<url>#<model> or mock:<script.json>")
        p.add_argument("--ablation", choices=ABLATIONS, default=None)

    p_syn = sub.add_parser("synthesize", help="search for a program that models the task")
    p_syn.add_argument("--env", default=None, help="environment directory")
    p_syn.add_argument("--problem", default=None, help="input/output problem directory")
    add_synthesis_flags(p_syn)
    add_common(p_syn)

    p_eval = sub.add_parser("evaluate", help="score an existing program against a task")
    p_eval.add_argument("--env", default=None)
    p_eval.add_argument("--problem", default=None)
    p_eval.add_argument("--program", required=True, help="path to the program file")
    add_common(p_eval)

    p_plan = sub.add_parser("plan", help="plan in the real environment using a program as the model")
    p_plan.add_argument("--env", required=True)
    p_plan.add_argument("--program", required=True)
    p_plan.add_argument("--episodes", type=int, default=10)
    p_plan.add_argument("--seed", type=int, default=0)
    p_plan.add_argument("--max-steps", type=int, default=100)
    add_common(p_plan)

    p_apps = sub.add_parser("apps-eval", help="synthesize for an input/output problem and score strictly")
    p_apps.add_argument("--problem", required=True)
    add_synthesis_flags(p_apps)
    add_common(p_apps)

    p_rep = sub.add_parser("report", help="aggregate run manifests into a results table")
    p_rep.add_argument("--runs", default="runs", help="directory holding run directories")
    p_rep.add_argument("--out", default=None, help="where to write the report run (default: --runs)")
    p_rep.add_argument("--server", default=None)

    p_srv = sub.add_parser("serve", help="run the HTTP service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)

    return parser


def _payload(args: argparse.Namespace) -> tuple[str, dict]:
    if args.command == "synthesize":
        return "/synthesize", {
            "env": args.env,
            "problem": args.problem,
            "method": args.method,
            "budget": args.budget,
            "seed": args.seed,
            "backend": args.backend,
            "ablation": args.ablation,
            "workers": args.workers,
            "out": args.out,
        }
    if args.command == "evaluate":
        return "/evaluate", {
            "env": args.env,
            "problem": args.problem,
            "program": args.program,
            "workers": args.workers,
            "out": args.out,
        }
    if args.command == "plan":
        return "/plan", {
            "env": args.env,
            "program": args.program,
            "episodes": args.episodes,
            "seed": args.seed,
            "max_steps": args.max_steps,
            "workers": args.workers,
            "out": args.out,
        }
    if args.command == "apps-eval":
        return "/apps-eval", {
            "problem": args.problem,
            "method": args.method,
            "budget": args.budget,
            "seed": args.seed,
            "backend": args.backend,
            "ablation": args.ablation,
            "workers": args.workers,
            "out": args.out,
        }
    if args.command == "report":
        return "/report", {"runs": args.runs, "out": args.out}
    raise AssertionError(f"unroutable command {args.command!r}")


async def _post_in_process(path: str, payload: dict) -> httpx.Response:
    from codeworlds.service.app import create_app

    transport = httpx.ASGITransport(app=create_app())
    async with httpx.AsyncClient(
        transport=transport, base_url="http://service.local", timeout=REQUEST_TIMEOUT
    ) as client:
        return await client.post(path, json=payload)


def _post(server: Optional[str], path: str, payload: dict) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=REQUEST_TIMEOUT) as client:
            return client.post(path, json=payload)
    return asyncio.run(_post_in_process(path, payload))


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from codeworlds.service.app import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0

    path, payload = _payload(args)
    try:
        response = _post(getattr(args, "server", None), path, payload)
    except httpx.HTTPError as exc:
        print(f"request failed: {exc}", file=sys.stderr)
        return 1

    if response.status_code < 300:
        print(json.dumps(response.json(), indent=2, sort_keys=True))
        return 0
    try:
        detail = response.json().get("detail", response.text)
    except ValueError:
        detail = response.text
    print(f"error ({response.status_code}): {json.dumps(detail) if not isinstance(detail, str) else detail}", file=sys.stderr)
    return 2 if response.status_code < 500 else 1


if __name__ == "__main__":
    sys.exit(main())
