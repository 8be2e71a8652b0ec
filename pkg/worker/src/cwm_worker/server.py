"""The worker's request loop: stdio ownership, dispatch, and error containment.

Startup order matters: the protocol stream is a duplicate of the original
stdout file descriptor taken before fd 1 is pointed at /dev/null, so candidate
code writing to fd 1 directly cannot corrupt the protocol; heavy imports
happen before the memory cap tightens the address space.
"""

from __future__ import annotations

import json
import os
import sys
from typing import Any, Optional, TextIO

from cwm_worker.limits import Limits, apply_memory_cap
from cwm_worker.runtime import Runtime
from cwm_worker.wire import (
    PROTOCOL_VERSION,
    ExecFailure,
    WireError,
    decode_request,
    encode_response,
    trace_excerpt,
)


def _probe_request_id(line: str) -> int:
    """Best-effort id extraction from a malformed request, for the error reply."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError:
        return -1
    if isinstance(obj, dict) and isinstance(obj.get("id"), int) and not isinstance(obj.get("id"), bool):
        return obj["id"]
    return -1


def _require(args: dict, key: str, kinds: tuple, what: str) -> Any:
    if key not in args:
        raise ExecFailure("protocol", f"op is missing required arg {key!r}")
    value = args[key]
    if not isinstance(value, kinds) or isinstance(value, bool):
        raise ExecFailure("protocol", f"arg {key!r} must be {what}")
    return value


def _dispatch(runtime: Runtime, op: str, args: dict) -> dict:
    if op == "handshake":
        return {"version": PROTOCOL_VERSION}
    if op == "load":
        runtime.load(_require(args, "source", (str,), "a string"))
        return {}
    if op == "step_from":
        if "s" not in args or "a" not in args:
            raise ExecFailure("protocol", "step_from needs args 's' and 'a'")
        s_next, reward, done = runtime.step_from(args["s"], args["a"])
        return {"s_next": s_next, "r": reward, "d": done}
    if op == "predict_batch":
        items = _require(args, "items", (list,), "a list")
        for item in items:
            if not isinstance(item, dict) or "s" not in item or "a" not in item:
                raise ExecFailure("protocol", "each predict_batch item needs 's' and 'a'")
        return {"results": runtime.predict_batch(items)}
    if op == "run_plan":
        if "s0" not in args:
            raise ExecFailure("protocol", "run_plan needs arg 's0'")
        actions = _require(args, "actions", (list,), "a list")
        return {"steps": runtime.run_plan(args["s0"], actions)}
    if op == "run_io":
        source = _require(args, "source", (str,), "a string")
        cases = _require(args, "cases", (list,), "a list")
        for case in cases:
            if not isinstance(case, str):
                raise ExecFailure("protocol", "each run_io case must be a string")
        timeout: Optional[float] = None
        if "timeout" in args:
            timeout = float(_require(args, "timeout", (int, float), "a number"))
        return {"results": runtime.run_io(source, cases, timeout)}
    raise ExecFailure("protocol", f"unhandled op {op!r}")


def serve(lines_in, proto_out: TextIO, runtime: Runtime) -> int:
    """Run the request loop until shutdown, EOF, or a fatal internal error."""

    def reply(line: str) -> bool:
        try:
            proto_out.write(line + "\n")
            proto_out.flush()
            return True
        except (BrokenPipeError, OSError):
            return False  # orchestrator is gone; stop serving

    for raw in lines_in:
        if not raw.strip():
            continue
        try:
            request = decode_request(raw)
        except WireError as exc:
            error = {"class": "protocol", "message": str(exc), "trace": ""}
            if not reply(encode_response(_probe_request_id(raw), error=error)):
                return 0
            continue
        if request["op"] == "shutdown":
            reply(encode_response(request["id"], result={}))
            return 0
        try:
            result = _dispatch(runtime, request["op"], request["args"])
            line = encode_response(request["id"], result=result)
        except ExecFailure as err:
            line = encode_response(request["id"], error=err.to_json())
        except Exception as exc:  # noqa: BLE001 - worker bug: report, then bail out
            import traceback

            error = {
                "class": "protocol",
                "message": f"internal worker error: {type(exc).__name__}: {exc}",
                "trace": trace_excerpt(traceback.format_exc()),
            }
            reply(encode_response(request["id"], error=error))
            return 1
        if not reply(line):
            return 0
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    first_line = sys.stdin.readline()
    if not first_line:
        return 0
    try:
        limits = Limits.from_json(json.loads(first_line))
    except (json.JSONDecodeError, ValueError) as exc:
        print(f"bad limits line: {exc}", file=sys.stderr)
        return 2

    # Claim the protocol stream, then silence fd 1 for everyone else.
    proto_out = os.fdopen(os.dup(sys.stdout.fileno()), "w", buffering=1)
    devnull = os.open(os.devnull, os.O_WRONLY)
    os.dup2(devnull, sys.stdout.fileno())
    os.close(devnull)

    apply_memory_cap(limits.memory_cap_bytes)
    return serve(sys.stdin, proto_out, Runtime(limits))


if __name__ == "__main__":
    raise SystemExit(main())
