"""Resource budgets: startup limits parsing, the process memory cap, and
per-call CPU/wall timers.

CPU budgets use the virtual interval timer so sleeping never counts against
them; wall budgets use the real timer. Both re-fire on a short interval while
armed, so candidate code that swallows the first timeout exception still gets
interrupted again. The orchestrator's kill-after-grace deadline remains the
final backstop.
"""

from __future__ import annotations

import resource
import signal
from contextlib import contextmanager
from dataclasses import dataclass

REFIRE_INTERVAL = 0.1


@dataclass(frozen=True)
class Limits:
    """Resource budget enforced on candidate code execution."""

    cpu_seconds_per_call: float = 1.0
    batch_wall_seconds: float = 60.0
    memory_cap_bytes: int = 512 * 1024 * 1024

    def __post_init__(self) -> None:
        if self.cpu_seconds_per_call <= 0:
            raise ValueError("cpu_seconds_per_call must be positive")
        if self.batch_wall_seconds <= 0:
            raise ValueError("batch_wall_seconds must be positive")
        if self.memory_cap_bytes <= 0:
            raise ValueError("memory_cap_bytes must be positive")

    @classmethod
    def from_json(cls, obj: object) -> "Limits":
        if not isinstance(obj, dict):
            raise ValueError("limits line must be a JSON object")
        kwargs = {}
        for key, caster in (
            ("cpu_seconds_per_call", float),
            ("batch_wall_seconds", float),
            ("memory_cap_bytes", int),
        ):
            if key in obj:
                try:
                    kwargs[key] = caster(obj[key])
                except (TypeError, ValueError):
                    raise ValueError(f"limits field {key!r} must be a number") from None
        return cls(**kwargs)


def apply_memory_cap(cap_bytes: int) -> None:
    """Cap the process address space; allocations beyond it raise MemoryError.

    Import everything heavy before calling this: the cap also constrains the
    worker's own code, and module imports need headroom.
    """
    try:
        _, hard = resource.getrlimit(resource.RLIMIT_AS)
        soft = cap_bytes if hard == resource.RLIM_INFINITY else min(cap_bytes, hard)
        resource.setrlimit(resource.RLIMIT_AS, (soft, hard))
    except (ValueError, OSError):
        # Platforms that refuse the limit still get CPU/wall enforcement.
        pass


class CallTimeout(Exception):
    """A per-call budget expired; `kind` says which clock ran out."""

    def __init__(self, kind: str):
        super().__init__(kind)
        self.kind = kind  # "cpu" | "wall"


def _raise_cpu(signo, frame):
    raise CallTimeout("cpu")


def _raise_wall(signo, frame):
    raise CallTimeout("wall")


@contextmanager
def _budget(itimer: int, signum: int, handler, seconds: float):
    previous = signal.signal(signum, handler)
    signal.setitimer(itimer, seconds, REFIRE_INTERVAL)
    try:
        yield
    finally:
        signal.setitimer(itimer, 0.0)
        signal.signal(signum, previous)


def cpu_budget(seconds: float):
    """Raise CallTimeout("cpu") once the calling process burns `seconds` of CPU."""
    return _budget(signal.ITIMER_VIRTUAL, signal.SIGVTALRM, _raise_cpu, seconds)


def wall_budget(seconds: float):
    """Raise CallTimeout("wall") once `seconds` of real time elapse."""
    return _budget(signal.ITIMER_REAL, signal.SIGALRM, _raise_wall, seconds)
