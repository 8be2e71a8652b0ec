"""Shared plumbing for worker tests.

Tests talk to the worker over its real stdio protocol with a small test-local
client, so they exercise exactly what an orchestrator would see. The worker
package is resolved from the adjacent src tree, making the suite independent
of whether the package is installed.

Kept outside conftest.py so tests can import these by a module name that stays
unambiguous when this suite and the repository's main suite run in one pytest
session.
"""

from __future__ import annotations

import json
import os
import select
import subprocess
import sys
import time
from pathlib import Path

WORKER_DIR = Path(__file__).resolve().parent.parent
WORKER_SRC = WORKER_DIR / "src"
REPO_ROOT = WORKER_DIR.parent
FIXTURES = REPO_ROOT / "fixtures"

if str(WORKER_SRC) not in sys.path:
    sys.path.insert(0, str(WORKER_SRC))

DEFAULT_LIMITS = {
    "cpu_seconds_per_call": 1.0,
    "batch_wall_seconds": 60.0,
    "memory_cap_bytes": 512 * 1024 * 1024,
}


def worker_env() -> dict:
    env = dict(os.environ)
    env["PYTHONPATH"] = str(WORKER_SRC) + os.pathsep + env.get("PYTHONPATH", "")
    return env


class WorkerProcess:
    """Minimal wire-level client for driving a worker under test."""

    def __init__(self, limits: dict | None = None, read_timeout: float = 30.0):
        self.read_timeout = read_timeout
        self.proc = subprocess.Popen(
            [sys.executable, "-m", "cwm_worker"],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            env=worker_env(),
        )
        self._next_id = 0
        self._buffer = b""
        payload = dict(DEFAULT_LIMITS)
        payload.update(limits or {})
        self.send_line(json.dumps(payload, separators=(",", ":")))

    # -- raw line transport --------------------------------------------------

    def send_line(self, line: str) -> None:
        self.proc.stdin.write(line.encode() + b"\n")
        self.proc.stdin.flush()

    def read_line(self) -> str:
        deadline = time.monotonic() + self.read_timeout
        fd = self.proc.stdout.fileno()
        while b"\n" not in self._buffer:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                self.kill()
                raise TimeoutError("no worker response within the test read timeout")
            ready, _, _ = select.select([fd], [], [], min(remaining, 0.25))
            if not ready:
                continue
            chunk = os.read(fd, 65536)
            if not chunk:
                raise EOFError("worker closed its protocol stream")
            self._buffer += chunk
        line, self._buffer = self._buffer.split(b"\n", 1)
        return line.decode()

    # -- request helpers -------------------------------------------------------

    def request(self, op: str, args: dict) -> dict:
        request_id = self._next_id
        self._next_id += 1
        self.send_line(json.dumps({"id": request_id, "op": op, "args": args}, separators=(",", ":")))
        response = json.loads(self.read_line())
        assert response["id"] == request_id
        return response

    def expect_ok(self, op: str, args: dict) -> dict:
        response = self.request(op, args)
        assert response["ok"], f"{op} failed: {response.get('error')}"
        return response["result"]

    def expect_error(self, op: str, args: dict) -> dict:
        response = self.request(op, args)
        assert not response["ok"], f"{op} unexpectedly succeeded: {response.get('result')}"
        return response["error"]

    # -- lifecycle ---------------------------------------------------------------

    def shutdown(self) -> int:
        try:
            self.expect_ok("shutdown", {})
        except (BrokenPipeError, EOFError, TimeoutError):
            pass
        try:
            return self.proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self.kill()
            return self.proc.returncode

    def kill(self) -> None:
        if self.proc.poll() is None:
            self.proc.kill()
            self.proc.wait(timeout=5)

    def __enter__(self) -> "WorkerProcess":
        return self

    def __exit__(self, *exc) -> None:
        self.kill()


def load_table(name: str) -> list[dict]:
    return json.loads((FIXTURES / name / "transition_table.json").read_text())
