"""Execution error taxonomy shared by every program-running backend."""

from __future__ import annotations

from dataclasses import dataclass

ERROR_CLASSES = ("syntax", "runtime", "timeout", "resource", "protocol")

TRACE_LINE_LIMIT = 20


@dataclass(frozen=True)
class ExecError(Exception):
    """A classified failure from loading or running a candidate program."""

    error_class: str
    message: str
    trace: str = ""

    def __post_init__(self) -> None:
        if self.error_class not in ERROR_CLASSES:
            raise ValueError(f"unknown error class {self.error_class!r}")

    def __str__(self) -> str:
        return f"{self.error_class}: {self.message}"

    def to_json(self) -> dict:
        return {"class": self.error_class, "message": self.message, "trace": self.trace}

    @classmethod
    def from_json(cls, obj: dict) -> "ExecError":
        return cls(
            error_class=str(obj.get("class", "runtime")),
            message=str(obj.get("message", "")),
            trace=str(obj.get("trace", "")),
        )


def trace_excerpt(text: str, limit: int = TRACE_LINE_LIMIT) -> str:
    """Keep only the last `limit` lines of a traceback."""
    lines = text.strip("\n").split("\n")
    return "\n".join(lines[-limit:])
