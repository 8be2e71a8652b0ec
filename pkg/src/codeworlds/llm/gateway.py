"""Completion gateway: one HTTP backend, one deterministic scripted backend."""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import httpx

from codeworlds.llm.prompts import PromptBundle

logger = logging.getLogger(__name__)

API_KEY_ENV = "CWM_LLM_API_KEY"


class GatewayError(RuntimeError):
    """A completion could not be obtained (after retries, or script exhausted)."""


@dataclass(frozen=True)
class SamplingParams:
    max_new_tokens: int = 1500
    temperature: float = 1.0
    top_k: int = 100
    top_p: float = 0.8

    def to_json(self) -> dict:
        return {
            "max_new_tokens": self.max_new_tokens,
            "temperature": self.temperature,
            "top_k": self.top_k,
            "top_p": self.top_p,
        }


@dataclass(frozen=True)
class BackendConfig:
    """Where completions come from: a chat-completions endpoint or a scripted mock."""

    kind: str  # "http" | "mock"
    base_url: str = ""
    model: str = ""
    script_path: str = ""
    api_key_env: str = API_KEY_ENV
    retries: int = 3
    backoff_seconds: float = 1.0
    request_timeout: float = 120.0
    rate_limit_per_second: Optional[float] = None
    supports_top_k: bool = False
    assistant_prefill: bool = True

    def __post_init__(self) -> None:
        if self.kind not in ("http", "mock"):
            raise ValueError(f"unknown backend kind {self.kind!r}")

    @classmethod
    def from_spec(cls, spec: str) -> "BackendConfig":
        """Parse a CLI backend spec: http:<url>#<model> or mock:<script path>."""
        if spec.startswith("http:"):
            rest = spec[len("http:"):]
            if "#" not in rest:
                raise ValueError("http backend spec must be http:<url>#<model>")
            url, model = rest.rsplit("#", 1)
            if not url or not model:
                raise ValueError("http backend spec must be http:<url>#<model>")
            return cls(kind="http", base_url=url.rstrip("/"), model=model)
        if spec.startswith("mock:"):
            path = spec[len("mock:"):]
            if not path:
                raise ValueError("mock backend spec must be mock:<script path>")
            return cls(kind="mock", script_path=path)
        raise ValueError(f"unknown backend spec {spec!r} (expected http:<url>#<model> or mock:<path>)")

    def describe(self) -> dict:
        """Manifest-safe description (never includes credentials)."""
        if self.kind == "http":
            return {"kind": "http", "base_url": self.base_url, "model": self.model}
        return {"kind": "mock", "script_path": self.script_path}


class MockScript:
    """Deterministic completion replay.

    Records carrying an action are consumed per (action, call index); records
    without one form a sequential pool shared by every action. An exhausted
    script raises GatewayError.
    """

    def __init__(self, records: list[Union[str, dict]]):
        keyed: dict[str, list[tuple[int, str]]] = defaultdict(list)
        self._pool: list[str] = []
        for position, record in enumerate(records):
            if isinstance(record, str):
                record = {"completion": record}
            if "completion" not in record:
                raise ValueError("mock script record missing 'completion'")
            action = record.get("action")
            if action is None:
                self._pool.append(record["completion"])
            else:
                keyed[str(action)].append((int(record.get("index", position)), record["completion"]))
        self._keyed = {
            action: [completion for _, completion in sorted(entries, key=lambda e: e[0])]
            for action, entries in keyed.items()
        }
        self._cursor: dict[str, int] = defaultdict(int)
        self._pool_cursor = 0

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "MockScript":
        data = json.loads(Path(path).read_text())
        if isinstance(data, dict) and "completions" in data:
            data = data["completions"]
        if not isinstance(data, list):
            raise ValueError("mock script file must hold a JSON list of records")
        return cls(data)

    def next_completion(self, action: str) -> str:
        queue = self._keyed.get(action)
        if queue is not None and self._cursor[action] < len(queue):
            value = queue[self._cursor[action]]
            self._cursor[action] += 1
            return value
        if self._pool_cursor < len(self._pool):
            value = self._pool[self._pool_cursor]
            self._pool_cursor += 1
            return value
        raise GatewayError(f"mock script exhausted (no completion left for action {action!r})")


class _RateGate:
    """Spaces calls at least 1/rate seconds apart, shared across threads."""

    def __init__(self, rate_per_second: Optional[float]):
        self._interval = 1.0 / rate_per_second if rate_per_second else 0.0
        self._lock = threading.Lock()
        self._next_allowed = 0.0

    def wait(self) -> None:
        if self._interval <= 0:
            return
        with self._lock:
            now = time.monotonic()
            delay = self._next_allowed - now
            self._next_allowed = max(now, self._next_allowed) + self._interval
        if delay > 0:
            time.sleep(delay)


class LlmGateway:
    """Turns rendered prompts into completions and counts every call."""

    def __init__(
        self,
        config: BackendConfig,
        params: SamplingParams = SamplingParams(),
        transport: Optional[httpx.BaseTransport] = None,
        script: Optional[MockScript] = None,
    ):
        self.config = config
        self.params = params
        self.calls_made = 0
        self._lock = threading.Lock()
        self._gate = _RateGate(config.rate_limit_per_second)
        self._warned_top_k = False
        if config.kind == "mock":
            self._script = script if script is not None else MockScript.from_file(config.script_path)
            self._client = None
        else:
            self._script = script
            self._client = httpx.Client(timeout=config.request_timeout, transport=transport)

    def complete(self, bundle: PromptBundle) -> str:
        """One completion for one rendered prompt; raises GatewayError on failure."""
        self._gate.wait()
        with self._lock:
            self.calls_made += 1
        if self.config.kind == "mock" or (self._script is not None and self._client is None):
            return self._script.next_completion(bundle.action)
        return self._complete_http(bundle)

    def _messages(self, bundle: PromptBundle) -> list[dict]:
        messages = []
        if bundle.system:
            messages.append({"role": "system", "content": bundle.system})
        user = bundle.user
        if bundle.assistant_prefix and not self.config.assistant_prefill:
            # Backend rejects partial assistant turns: fold the prefix into the
            # user message so the model still starts its reply the same way.
            user = f"{user}\n\nBegin your reply with:\n{bundle.assistant_prefix}"
        messages.append({"role": "user", "content": user})
        if bundle.assistant_prefix and self.config.assistant_prefill:
            messages.append({"role": "assistant", "content": bundle.assistant_prefix})
        return messages

    def _complete_http(self, bundle: PromptBundle) -> str:
        body: dict[str, Any] = {
            "model": self.config.model,
            "messages": self._messages(bundle),
            "max_tokens": self.params.max_new_tokens,
            "temperature": self.params.temperature,
            "top_p": self.params.top_p,
        }
        if self.config.supports_top_k:
            body["top_k"] = self.params.top_k
        elif not self._warned_top_k:
            logger.debug("backend %s does not advertise top_k support; omitting it", self.config.base_url)
            self._warned_top_k = True
        headers = {}
        api_key = os.environ.get(self.config.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        url = f"{self.config.base_url}/chat/completions"

        last_error: Optional[str] = None
        for attempt in range(self.config.retries + 1):
            if attempt:
                time.sleep(self.config.backoff_seconds * (2 ** (attempt - 1)))
            try:
                response = self._client.post(url, json=body, headers=headers)
            except httpx.HTTPError as exc:
                last_error = f"transport error: {exc}"
                continue
            if response.status_code == 429 or response.status_code >= 500:
                last_error = f"status {response.status_code}"
                continue
            if response.status_code != 200:
                raise GatewayError(f"completion request failed with status {response.status_code}: {response.text[:500]}")
            try:
                data = response.json()
                return data["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
                raise GatewayError(f"malformed completion response: {exc}") from None
        raise GatewayError(f"completion failed after {self.config.retries + 1} attempts ({last_error})")

    def close(self) -> None:
        if self._client is not None:
            self._client.close()
