"""In-process program execution.

Runs candidate programs inside the orchestrator interpreter. This is the fast
path used by tests and by planning over trusted fixture programs; it applies
the same operation surface and error taxonomy as the subprocess worker but
does not contain crashes or memory abuse (use the worker for untrusted code).
"""

from __future__ import annotations

import io
import sys
import time
import traceback
from contextlib import contextmanager
from typing import Any, Optional, Sequence

import numpy as np

from codeworlds.sandbox.errors import ExecError, trace_excerpt

ENTRY_CLASS = "Environment"
REQUIRED_METHODS = ("set_state", "step")


class _GuardTimeout(Exception):
    pass


@contextmanager
def _deadline(seconds: Optional[float]):
    """Best-effort wall-clock guard for in-process execution of candidate code."""
    if seconds is None:
        yield
        return
    limit = time.monotonic() + seconds
    prev = sys.gettrace()

    def tracer(frame, event, arg):
        if time.monotonic() > limit:
            raise _GuardTimeout()
        return tracer

    sys.settrace(tracer)
    try:
        yield
    finally:
        sys.settrace(prev)


def _runtime_error(exc: BaseException) -> ExecError:
    return ExecError(
        error_class="runtime",
        message=f"{type(exc).__name__}: {exc}",
        trace=trace_excerpt(traceback.format_exc()),
    )


def _coerce_state(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        raise ExecError("runtime", "step returned a boolean observation")
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (list, tuple, np.ndarray)):
        arr = np.asarray(value)
        if arr.ndim != 1 or arr.size == 0 or not np.issubdtype(arr.dtype, np.number):
            raise ExecError("runtime", f"step returned a malformed observation: {value!r}")
        return [float(x) for x in arr]
    raise ExecError("runtime", f"step returned a non-numeric observation: {type(value).__name__}")


def coerce_step_result(out: Any) -> tuple[Any, float, bool]:
    """Validate and canonicalize a candidate step() return into (s_next, r, d)."""
    if isinstance(out, (list, tuple)) and len(out) == 3:
        obs, reward, done = out
    else:
        raise ExecError("runtime", "step must return a 3-tuple (observation, reward, done)")
    obs = _coerce_state(obs)
    if isinstance(reward, (bool, np.bool_)) or not isinstance(reward, (int, float, np.integer, np.floating)):
        raise ExecError("runtime", f"step returned a non-numeric reward: {reward!r}")
    if isinstance(done, (bool, np.bool_)):
        done_flag = bool(done)
    elif isinstance(done, (int, np.integer)) and int(done) in (0, 1):
        done_flag = bool(int(done))
    else:
        raise ExecError("runtime", f"step returned a non-boolean done flag: {done!r}")
    return obs, float(reward), done_flag


def _prepare_state(state: Any) -> Any:
    if isinstance(state, tuple):
        return list(state)
    if isinstance(state, np.ndarray):
        return [float(x) for x in state]
    return state


class LocalExecutor:
    """Loads one candidate program at a time and runs transitions in-process."""

    def __init__(self, step_timeout: Optional[float] = None, io_timeout: float = 1.0):
        self.step_timeout = step_timeout
        self.io_timeout = io_timeout
        self._env: Any = None
        self._source: Optional[str] = None

    @property
    def loaded(self) -> bool:
        return self._env is not None

    def load_program(self, source: str) -> None:
        """Compile, exec and instantiate the candidate; raises ExecError on failure."""
        self._env = None
        self._source = None
        try:
            code = compile(source, "<candidate>", "exec")
        except SyntaxError as exc:
            raise ExecError("syntax", f"SyntaxError: {exc.msg} (line {exc.lineno})") from None
        namespace: dict[str, Any] = {"__name__": "__candidate__"}
        try:
            exec(code, namespace)
        except _GuardTimeout:
            raise ExecError("timeout", "program load exceeded the time budget") from None
        except BaseException as exc:  # noqa: BLE001 - candidate code may raise anything
            raise _runtime_error(exc) from None
        cls = namespace.get(ENTRY_CLASS)
        if cls is None or not isinstance(cls, type):
            raise ExecError("runtime", f"missing member {ENTRY_CLASS}")
        try:
            env = cls()
        except BaseException as exc:  # noqa: BLE001
            raise _runtime_error(exc) from None
        for method in REQUIRED_METHODS:
            if not callable(getattr(env, method, None)):
                raise ExecError("runtime", f"missing member {method}")
        self._env = env
        self._source = source

    def _require_loaded(self) -> Any:
        if self._env is None:
            raise ExecError("protocol", "no program loaded")
        return self._env

    def step_from(self, state: Any, action: Any) -> tuple[Any, float, bool]:
        env = self._require_loaded()
        try:
            with _deadline(self.step_timeout):
                env.set_state(_prepare_state(state))
                out = env.step(action)
        except ExecError:
            raise
        except _GuardTimeout:
            raise ExecError("timeout", "step exceeded the time budget") from None
        except BaseException as exc:  # noqa: BLE001
            raise _runtime_error(exc) from None
        return coerce_step_result(out)

    def predict_batch(self, items: Sequence[tuple[Any, Any]]) -> list[dict]:
        """Predict each (state, action) independently; per-item errors do not abort the batch."""
        results: list[dict] = []
        for state, action in items:
            try:
                s_next, reward, done = self.step_from(state, action)
                results.append({"ok": True, "s_next": s_next, "r": reward, "d": done})
            except ExecError as err:
                results.append({"ok": False, "error": err})
        return results

    def run_plan(self, state: Any, actions: Sequence[Any]) -> list[tuple[Any, float, bool]]:
        """Roll a plan forward from `state`, stopping early when done is reached."""
        env = self._require_loaded()
        steps: list[tuple[Any, float, bool]] = []
        try:
            with _deadline(self.step_timeout):
                env.set_state(_prepare_state(state))
                for action in actions:
                    out = env.step(action)
                    s_next, reward, done = coerce_step_result(out)
                    steps.append((s_next, reward, done))
                    if done:
                        break
        except ExecError:
            raise
        except _GuardTimeout:
            raise ExecError("timeout", "plan rollout exceeded the time budget") from None
        except BaseException as exc:  # noqa: BLE001
            raise _runtime_error(exc) from None
        return steps

    def run_io(self, source: str, cases: Sequence[str], timeout: Optional[float] = None) -> list[dict]:
        """Run a stdin/stdout program once per case, capturing stdout."""
        timeout = self.io_timeout if timeout is None else timeout
        try:
            code = compile(source, "<candidate>", "exec")
        except SyntaxError as exc:
            err = ExecError("syntax", f"SyntaxError: {exc.msg} (line {exc.lineno})")
            return [{"ok": False, "error": err} for _ in cases]
        results: list[dict] = []
        for case in cases:
            old_stdin, old_stdout = sys.stdin, sys.stdout
            sys.stdin = io.StringIO(case)
            sys.stdout = io.StringIO()
            try:
                with _deadline(timeout):
                    exec(code, {"__name__": "__main__"})
                results.append({"ok": True, "stdout": sys.stdout.getvalue()})
            except SystemExit:
                results.append({"ok": True, "stdout": sys.stdout.getvalue()})
            except _GuardTimeout:
                results.append({"ok": False, "error": ExecError("timeout", f"case exceeded {timeout}s")})
            except BaseException as exc:  # noqa: BLE001
                results.append({"ok": False, "error": _runtime_error(exc)})
            finally:
                sys.stdin, sys.stdout = old_stdin, old_stdout
        return results
