"""Loading and running candidate environment programs under resource budgets.

A candidate defines an `Environment` class with `set_state(state)` and
`step(action) -> (observation, reward, done)`. Observations are coerced to
JSON-friendly numeric form; anything else is a classified failure. Candidate
stdout/stderr are captured into a capped buffer and attached to error traces
so nothing the program prints can reach the protocol stream.
"""

from __future__ import annotations

import io
import sys
import traceback
from typing import Any, Optional, Sequence

import numpy as np

from cwm_worker.limits import CallTimeout, Limits, cpu_budget, wall_budget
from cwm_worker.wire import ExecFailure, trace_excerpt

ENTRY_CLASS = "Environment"
REQUIRED_METHODS = ("set_state", "step")
OUTPUT_CAP_CHARS = 64 * 1024
DEFAULT_IO_TIMEOUT = 1.0


class CappedBuffer(io.TextIOBase):
    """Write sink keeping only the first OUTPUT_CAP_CHARS characters."""

    def __init__(self, cap: int = OUTPUT_CAP_CHARS):
        self._cap = cap
        self._parts: list[str] = []
        self._size = 0
        self.truncated = False

    def writable(self) -> bool:
        return True

    def write(self, text: str) -> int:
        text = str(text)
        room = self._cap - self._size
        if room > 0:
            kept = text[:room]
            self._parts.append(kept)
            self._size += len(kept)
        if len(text) > max(room, 0):
            self.truncated = True
        return len(text)

    def getvalue(self) -> str:
        value = "".join(self._parts)
        if self.truncated:
            value += "\n... [output truncated]"
        return value


class _CapturedOutput:
    """Swap candidate-visible stdout/stderr for an in-memory buffer."""

    def __init__(self, stdout=None):
        self.buffer = CappedBuffer()
        self._stdout = stdout if stdout is not None else self.buffer

    def __enter__(self) -> "_CapturedOutput":
        self._old = sys.stdout, sys.stderr
        sys.stdout, sys.stderr = self._stdout, self.buffer
        return self

    def __exit__(self, *exc) -> None:
        sys.stdout, sys.stderr = self._old


def _runtime_failure(exc: BaseException, captured: str = "") -> ExecFailure:
    trace = trace_excerpt(traceback.format_exc())
    if captured:
        trace += "\n--- captured candidate output ---\n" + captured
    return ExecFailure("runtime", f"{type(exc).__name__}: {exc}", trace)


def _timeout_failure(timeout: CallTimeout, what: str, limits: Limits) -> ExecFailure:
    if timeout.kind == "cpu":
        return ExecFailure("timeout", f"{what} exceeded the {limits.cpu_seconds_per_call}s CPU budget")
    return ExecFailure("timeout", f"{what} exceeded the {limits.batch_wall_seconds}s wall budget")


def _coerce_state(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        raise ExecFailure("runtime", "step returned a boolean observation")
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (list, tuple, np.ndarray)):
        arr = np.asarray(value)
        if arr.ndim != 1 or arr.size == 0 or not np.issubdtype(arr.dtype, np.number):
            raise ExecFailure("runtime", f"step returned a malformed observation: {value!r}")
        return [float(x) for x in arr]
    raise ExecFailure("runtime", f"step returned a non-numeric observation: {type(value).__name__}")


def coerce_step_result(out: Any) -> tuple[Any, float, bool]:
    """Validate and canonicalize a candidate step() return into (s_next, r, d)."""
    if isinstance(out, (list, tuple)) and len(out) == 3:
        obs, reward, done = out
    else:
        raise ExecFailure("runtime", "step must return a 3-tuple (observation, reward, done)")
    obs = _coerce_state(obs)
    if isinstance(reward, (bool, np.bool_)) or not isinstance(reward, (int, float, np.integer, np.floating)):
        raise ExecFailure("runtime", f"step returned a non-numeric reward: {reward!r}")
    if isinstance(done, (bool, np.bool_)):
        done_flag = bool(done)
    elif isinstance(done, (int, np.integer)) and int(done) in (0, 1):
        done_flag = bool(int(done))
    else:
        raise ExecFailure("runtime", f"step returned a non-boolean done flag: {done!r}")
    return obs, float(reward), done_flag


def _prepare_state(state: Any) -> Any:
    if isinstance(state, tuple):
        return list(state)
    return state


class Runtime:
    """Holds at most one loaded candidate and runs operations under budgets."""

    def __init__(self, limits: Limits = Limits()):
        self.limits = limits
        self._env: Any = None

    @property
    def loaded(self) -> bool:
        return self._env is not None

    # -- load ----------------------------------------------------------------

    def load(self, source: str) -> None:
        """Compile, exec and instantiate the candidate; raises ExecFailure."""
        self._env = None
        try:
            code = compile(source, "<candidate>", "exec")
        except SyntaxError as exc:
            raise ExecFailure("syntax", f"SyntaxError: {exc.msg} (line {exc.lineno})") from None
        namespace: dict[str, Any] = {"__name__": "__candidate__"}
        with _CapturedOutput() as captured:
            try:
                with wall_budget(self.limits.batch_wall_seconds), cpu_budget(self.limits.cpu_seconds_per_call):
                    exec(code, namespace)
                    cls = namespace.get(ENTRY_CLASS)
                    if cls is None or not isinstance(cls, type):
                        raise ExecFailure("runtime", f"missing member {ENTRY_CLASS}")
                    env = cls()
                    for method in REQUIRED_METHODS:
                        if not callable(getattr(env, method, None)):
                            raise ExecFailure("runtime", f"missing member {method}")
            except ExecFailure:
                raise
            except CallTimeout as timeout:
                raise _timeout_failure(timeout, "program load", self.limits) from None
            except MemoryError:
                raise ExecFailure("resource", "program load exceeded the memory cap") from None
            except BaseException as exc:  # noqa: BLE001 - candidate code may raise anything
                raise _runtime_failure(exc, captured.buffer.getvalue()) from None
        self._env = env

    def _require_loaded(self) -> Any:
        if self._env is None:
            raise ExecFailure("protocol", "no program loaded")
        return self._env

    # -- transitions ----------------------------------------------------------

    def _call_candidate(self, what: str, fn):
        """Run one candidate callable under the per-call CPU budget, classifying
        everything it can throw. Wall timeouts pass through to the caller's
        whole-request budget handler."""
        with _CapturedOutput() as captured:
            try:
                with cpu_budget(self.limits.cpu_seconds_per_call):
                    return fn()
            except ExecFailure:
                raise
            except CallTimeout as timeout:
                if timeout.kind == "wall":
                    raise
                raise _timeout_failure(timeout, what, self.limits) from None
            except MemoryError:
                raise ExecFailure("resource", f"{what} exceeded the memory cap") from None
            except BaseException as exc:  # noqa: BLE001
                raise _runtime_failure(exc, captured.buffer.getvalue()) from None

    def _step_once(self, env: Any, state: Any, action: Any) -> tuple[Any, float, bool]:
        def call():
            env.set_state(_prepare_state(state))
            return env.step(action)

        return coerce_step_result(self._call_candidate("step", call))

    def step_from(self, state: Any, action: Any) -> tuple[Any, float, bool]:
        env = self._require_loaded()
        try:
            with wall_budget(self.limits.batch_wall_seconds):
                return self._step_once(env, state, action)
        except CallTimeout as timeout:
            raise _timeout_failure(timeout, "step", self.limits) from None

    def predict_batch(self, items: Sequence[dict]) -> list[dict]:
        """Predict each {s, a} independently; per-item failures do not abort the
        batch, but blowing the whole-batch wall budget does."""
        env = self._require_loaded()
        results: list[dict] = []
        try:
            with wall_budget(self.limits.batch_wall_seconds):
                for item in items:
                    try:
                        s_next, reward, done = self._step_once(env, item["s"], item["a"])
                        results.append({"ok": True, "s_next": s_next, "r": reward, "d": done})
                    except ExecFailure as err:
                        results.append({"ok": False, "error": err.to_json()})
        except CallTimeout as timeout:
            raise _timeout_failure(timeout, "predict batch", self.limits) from None
        return results

    def run_plan(self, state: Any, actions: Sequence[Any]) -> list[dict]:
        """Roll a plan forward from `state`, stopping early when done is reached.

        The instance is seeded once and then stepped in place, so candidates
        with internal state richer than the observation keep it across steps.
        """
        env = self._require_loaded()
        steps: list[dict] = []
        try:
            with wall_budget(self.limits.batch_wall_seconds):
                self._call_candidate("set_state", lambda: env.set_state(_prepare_state(state)))
                for action in actions:
                    out = self._call_candidate("step", lambda: env.step(action))
                    s_next, reward, done = coerce_step_result(out)
                    steps.append({"s_next": s_next, "r": reward, "d": done})
                    if done:
                        break
        except CallTimeout as timeout:
            raise _timeout_failure(timeout, "plan rollout", self.limits) from None
        return steps

    # -- stdin/stdout programs -------------------------------------------------

    def run_io(self, source: str, cases: Sequence[str], timeout: Optional[float] = None) -> list[dict]:
        """Run a stdin/stdout program once per case in a fresh namespace."""
        case_timeout = DEFAULT_IO_TIMEOUT if timeout is None else float(timeout)
        try:
            code = compile(source, "<candidate>", "exec")
        except SyntaxError as exc:
            err = ExecFailure("syntax", f"SyntaxError: {exc.msg} (line {exc.lineno})")
            return [{"ok": False, "error": err.to_json()} for _ in cases]
        results: list[dict] = []
        for case in cases:
            stdout = io.StringIO()
            old_stdin = sys.stdin
            sys.stdin = io.StringIO(case)
            try:
                with _CapturedOutput(stdout=stdout) as captured:
                    try:
                        with wall_budget(case_timeout), cpu_budget(self.limits.cpu_seconds_per_call):
                            exec(code, {"__name__": "__main__"})
                        results.append({"ok": True, "stdout": stdout.getvalue()})
                    except SystemExit:
                        results.append({"ok": True, "stdout": stdout.getvalue()})
                    except CallTimeout:
                        err = ExecFailure("timeout", f"case exceeded {case_timeout}s")
                        results.append({"ok": False, "error": err.to_json()})
                    except MemoryError:
                        err = ExecFailure("resource", "case exceeded the memory cap")
                        results.append({"ok": False, "error": err.to_json()})
                    except BaseException as exc:  # noqa: BLE001
                        err = _runtime_failure(exc, captured.buffer.getvalue())
                        results.append({"ok": False, "error": err.to_json()})
            finally:
                sys.stdin = old_stdin
        return results
