"""Line-delimited JSON wire format spoken on the worker's stdio.

Requests carry {id, op, args}; responses carry {id, ok, result} on success or
{id, ok, error} on failure, where error is {class, message, trace}. Both
directions are implemented so the codec can be round-trip tested in place.
"""

from __future__ import annotations

import json
from typing import Any, Optional

PROTOCOL_VERSION = 1

OPS = ("handshake", "load", "predict_batch", "step_from", "run_plan", "run_io", "shutdown")

ERROR_CLASSES = ("syntax", "runtime", "timeout", "resource", "protocol")

TRACE_LINE_LIMIT = 20


class WireError(ValueError):
    """A message that does not conform to the wire format."""


class ExecFailure(Exception):
    """A classified failure from loading or running a candidate program."""

    def __init__(self, error_class: str, message: str, trace: str = ""):
        if error_class not in ERROR_CLASSES:
            raise ValueError(f"unknown error class {error_class!r}")
        super().__init__(f"{error_class}: {message}")
        self.error_class = error_class
        self.message = message
        self.trace = trace

    def to_json(self) -> dict:
        return {"class": self.error_class, "message": self.message, "trace": self.trace}

    @classmethod
    def from_json(cls, obj: dict) -> "ExecFailure":
        return cls(
            error_class=str(obj.get("class", "runtime")),
            message=str(obj.get("message", "")),
            trace=str(obj.get("trace", "")),
        )


def trace_excerpt(text: str, limit: int = TRACE_LINE_LIMIT) -> str:
    """Keep only the last `limit` lines of a traceback."""
    lines = text.strip("\n").split("\n")
    return "\n".join(lines[-limit:])


def encode_request(request_id: int, op: str, args: dict) -> str:
    if op not in OPS:
        raise WireError(f"unknown op {op!r}")
    return json.dumps({"id": request_id, "op": op, "args": args}, separators=(",", ":"))


def decode_request(line: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise WireError(f"request is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise WireError("request must be a JSON object")
    if not isinstance(obj.get("id"), int) or isinstance(obj.get("id"), bool):
        raise WireError("request field 'id' must be an integer")
    if obj.get("op") not in OPS:
        raise WireError(f"request field 'op' must be one of {OPS}")
    args = obj.get("args", {})
    if not isinstance(args, dict):
        raise WireError("request field 'args' must be an object")
    return {"id": obj["id"], "op": obj["op"], "args": args}


def encode_response(request_id: int, result: Optional[dict] = None, error: Optional[dict] = None) -> str:
    if (result is None) == (error is None):
        raise WireError("response needs exactly one of result or error")
    if error is not None:
        if error.get("class") not in ERROR_CLASSES:
            raise WireError(f"error class must be one of {ERROR_CLASSES}")
        payload: dict[str, Any] = {"id": request_id, "ok": False, "error": error}
    else:
        payload = {"id": request_id, "ok": True, "result": result}
    return json.dumps(payload, separators=(",", ":"))


def decode_response(line: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise WireError(f"response is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise WireError("response must be a JSON object")
    if not isinstance(obj.get("id"), int) or isinstance(obj.get("id"), bool):
        raise WireError("response field 'id' must be an integer")
    if not isinstance(obj.get("ok"), bool):
        raise WireError("response field 'ok' must be a boolean")
    if obj["ok"]:
        if not isinstance(obj.get("result"), dict):
            raise WireError("successful response must carry an object 'result'")
        return {"id": obj["id"], "ok": True, "result": obj["result"]}
    error = obj.get("error")
    if not isinstance(error, dict):
        raise WireError("failed response must carry an object 'error'")
    if error.get("class") not in ERROR_CLASSES:
        raise WireError(f"error class must be one of {ERROR_CLASSES}")
    if not isinstance(error.get("message", ""), str) or not isinstance(error.get("trace", ""), str):
        raise WireError("error message and trace must be strings")
    return {"id": obj["id"], "ok": False, "error": error}
