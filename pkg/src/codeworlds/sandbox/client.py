"""Client side of the execution worker: process ownership and protocol calls."""

from __future__ import annotations

import json
import logging
import os
import select
import subprocess
import threading
import time
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

from codeworlds.sandbox.errors import ExecError
from codeworlds.sandbox.protocol import PROTOCOL_VERSION, ProtocolError, decode_response, encode_request

logger = logging.getLogger(__name__)

KILL_GRACE_SECONDS = 1.0


@dataclass(frozen=True)
class SandboxLimits:
    """Resource budget enforced on candidate code execution."""

    cpu_seconds_per_call: float = 1.0
    batch_wall_seconds: float = 60.0
    memory_cap_bytes: int = 512 * 1024 * 1024

    def to_json(self) -> dict:
        return {
            "cpu_seconds_per_call": self.cpu_seconds_per_call,
            "batch_wall_seconds": self.batch_wall_seconds,
            "memory_cap_bytes": self.memory_cap_bytes,
        }


class WorkerClient:
    """Owns one worker subprocess and speaks line-delimited JSON with it.

    A worker crash or deadline overrun never propagates as an unhandled
    exception: the handle is marked dead and the failed call raises a
    classified ExecError. A dead handle can simply be replaced by a new client.
    """

    def __init__(
        self,
        command: Sequence[str],
        limits: SandboxLimits = SandboxLimits(),
        env: Optional[dict] = None,
    ):
        self.command = list(command)
        self.limits = limits
        self._next_id = 0
        self._buffer = b""
        self._dead = False
        self._proc = subprocess.Popen(
            self.command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            env={**os.environ, **env} if env else None,
            bufsize=0,
        )
        try:
            self._write_line(json.dumps(self.limits.to_json(), separators=(",", ":")))
            self._handshake()
        except ExecError:
            self.kill()
            raise

    # -- low-level plumbing ------------------------------------------------

    @property
    def alive(self) -> bool:
        return not self._dead and self._proc.poll() is None

    def _mark_dead(self) -> None:
        self._dead = True

    def kill(self) -> None:
        self._mark_dead()
        if self._proc.poll() is None:
            self._proc.kill()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:  # pragma: no cover - kernel refused the kill
                pass

    def close(self) -> None:
        if self.alive:
            try:
                self._request("shutdown", {}, timeout=2.0)
            except ExecError:
                pass
        self.kill()

    def __enter__(self) -> "WorkerClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _write_line(self, line: str) -> None:
        if not self.alive:
            raise ExecError("resource", "worker process is not running")
        try:
            self._proc.stdin.write(line.encode() + b"\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError, ValueError):
            self._mark_dead()
            raise ExecError("resource", "worker process died while receiving a request") from None

    def _read_line(self, deadline: float) -> str:
        fd = self._proc.stdout.fileno()
        while b"\n" not in self._buffer:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                self.kill()
                raise ExecError("timeout", "worker gave no response within the wall timeout; killed")
            ready, _, _ = select.select([fd], [], [], min(remaining, 0.25))
            if not ready:
                continue
            chunk = os.read(fd, 65536)
            if not chunk:
                self._mark_dead()
                raise ExecError("resource", "worker process died before responding")
            self._buffer += chunk
        line, self._buffer = self._buffer.split(b"\n", 1)
        return line.decode()

    def _request(self, op: str, args: dict, timeout: Optional[float] = None) -> dict:
        request_id = self._next_id
        self._next_id += 1
        wall = self.limits.batch_wall_seconds if timeout is None else timeout
        deadline = time.monotonic() + wall + KILL_GRACE_SECONDS
        self._write_line(encode_request(request_id, op, args))
        while True:
            raw = self._read_line(deadline)
            try:
                response = decode_response(raw)
            except ProtocolError as exc:
                self.kill()
                raise ExecError("protocol", f"unparseable worker response: {exc}") from None
            if response["id"] != request_id:
                # Stale response from an earlier timed-out call; drop it.
                continue
            if response["ok"]:
                return response["result"]
            raise response["error"]

    def _handshake(self) -> None:
        result = self._request("handshake", {"version": PROTOCOL_VERSION}, timeout=10.0)
        version = result.get("version")
        if version != PROTOCOL_VERSION:
            raise ExecError("protocol", f"worker speaks protocol {version!r}, expected {PROTOCOL_VERSION}")

    # -- operations ---------------------------------------------------------

    def load_program(self, source: str) -> None:
        self._request("load", {"source": source})

    def step_from(self, state: Any, action: Any) -> tuple[Any, float, bool]:
        result = self._request("step_from", {"s": state, "a": action})
        return result["s_next"], result["r"], result["d"]

    def predict_batch(self, items: Sequence[tuple[Any, Any]]) -> list[dict]:
        args = {"items": [{"s": s, "a": a} for s, a in items]}
        result = self._request("predict_batch", args)
        out: list[dict] = []
        for item in result["results"]:
            if item.get("ok"):
                out.append({"ok": True, "s_next": item["s_next"], "r": item["r"], "d": item["d"]})
            else:
                out.append({"ok": False, "error": ExecError.from_json(item["error"])})
        return out

    def run_plan(self, state: Any, actions: Sequence[Any]) -> list[tuple[Any, float, bool]]:
        result = self._request("run_plan", {"s0": state, "actions": list(actions)})
        return [(step["s_next"], step["r"], step["d"]) for step in result["steps"]]

    def run_io(self, source: str, cases: Sequence[str], timeout: Optional[float] = None) -> list[dict]:
        args = {"source": source, "cases": list(cases)}
        if timeout is not None:
            args["timeout"] = timeout
        result = self._request("run_io", args)
        out: list[dict] = []
        for item in result["results"]:
            if item.get("ok"):
                out.append({"ok": True, "stdout": item["stdout"]})
            else:
                out.append({"ok": False, "error": ExecError.from_json(item["error"])})
        return out


class WorkerPool:
    """A fixed pool of executors used to fan plan scoring out across processes.

    Results are keyed by plan index so ordering is stable regardless of which
    executor ran which plan.
    """

    def __init__(self, factory: Callable[[], Any], size: int = 1):
        if size < 1:
            raise ValueError("pool size must be >= 1")
        self.executors = [factory() for _ in range(size)]

    def load_program(self, source: str) -> None:
        for executor in self.executors:
            executor.load_program(source)

    def step_from(self, state: Any, action: Any) -> tuple[Any, float, bool]:
        return self.executors[0].step_from(state, action)

    def run_plan(self, state: Any, actions: Sequence[Any]) -> list[tuple[Any, float, bool]]:
        return self.executors[0].run_plan(state, actions)

    def run_plans(self, state: Any, plans: Sequence[Sequence[Any]]) -> list[Any]:
        """Run many plans from one state; each result is a step list or an ExecError."""
        results: list[Any] = [None] * len(plans)
        if len(self.executors) == 1:
            for i, plan in enumerate(plans):
                results[i] = self._run_one(self.executors[0], state, plan)
            return results

        chunks: list[list[int]] = [[] for _ in self.executors]
        for i in range(len(plans)):
            chunks[i % len(self.executors)].append(i)

        def work(executor, indices):
            for i in indices:
                results[i] = self._run_one(executor, state, plans[i])

        threads = [
            threading.Thread(target=work, args=(executor, indices))
            for executor, indices in zip(self.executors, chunks)
            if indices
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        return results

    @staticmethod
    def _run_one(executor, state, plan):
        try:
            return executor.run_plan(state, plan)
        except ExecError as err:
            return err

    def close(self) -> None:
        for executor in self.executors:
            close = getattr(executor, "close", None)
            if close is not None:
                close()
