"""Line-delimited JSON wire protocol between the orchestrator and execution workers.

Every message is one JSON object per line. Requests carry {id, op, args};
responses carry {id, ok, result} on success or {id, ok, error} on failure,
where error is {class, message, trace}.
"""

from __future__ import annotations

import json
from typing import Any, Optional

from codeworlds.sandbox.errors import ERROR_CLASSES, ExecError

PROTOCOL_VERSION = 1

OPS = ("handshake", "load", "predict_batch", "step_from", "run_plan", "run_io", "shutdown")


class ProtocolError(ValueError):
    """A message that does not conform to the wire protocol."""


def encode_request(request_id: int, op: str, args: dict) -> str:
    if op not in OPS:
        raise ProtocolError(f"unknown op {op!r}")
    return json.dumps({"id": request_id, "op": op, "args": args}, separators=(",", ":"))


def decode_request(line: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"request is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ProtocolError("request must be a JSON object")
    if not isinstance(obj.get("id"), int) or isinstance(obj.get("id"), bool):
        raise ProtocolError("request field 'id' must be an integer")
    if obj.get("op") not in OPS:
        raise ProtocolError(f"request field 'op' must be one of {OPS}")
    args = obj.get("args", {})
    if not isinstance(args, dict):
        raise ProtocolError("request field 'args' must be an object")
    return {"id": obj["id"], "op": obj["op"], "args": args}


def encode_response(request_id: int, result: Optional[dict] = None, error: Optional[ExecError] = None) -> str:
    if (result is None) == (error is None):
        raise ProtocolError("response needs exactly one of result or error")
    if error is not None:
        payload: dict[str, Any] = {"id": request_id, "ok": False, "error": error.to_json()}
    else:
        payload = {"id": request_id, "ok": True, "result": result}
    return json.dumps(payload, separators=(",", ":"))


def decode_response(line: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"response is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ProtocolError("response must be a JSON object")
    if not isinstance(obj.get("id"), int) or isinstance(obj.get("id"), bool):
        raise ProtocolError("response field 'id' must be an integer")
    if not isinstance(obj.get("ok"), bool):
        raise ProtocolError("response field 'ok' must be a boolean")
    if obj["ok"]:
        if not isinstance(obj.get("result"), dict):
            raise ProtocolError("successful response must carry an object 'result'")
        return {"id": obj["id"], "ok": True, "result": obj["result"]}
    error = obj.get("error")
    if not isinstance(error, dict):
        raise ProtocolError("failed response must carry an object 'error'")
    if error.get("class") not in ERROR_CLASSES:
        raise ProtocolError(f"error class must be one of {ERROR_CLASSES}")
    if not isinstance(error.get("message", ""), str) or not isinstance(error.get("trace", ""), str):
        raise ProtocolError("error message and trace must be strings")
    return {"id": obj["id"], "ok": False, "error": ExecError.from_json(error)}
