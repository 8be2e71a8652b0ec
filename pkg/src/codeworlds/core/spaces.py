"""Action/observation space descriptions shared by ingestion, evaluation and planning."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

import numpy as np


class SpaceError(ValueError):
    """Raised for malformed space definitions or values that do not conform."""


def _is_integral(value: Any) -> bool:
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return False
    if isinstance(value, (int, np.integer)):
        return True
    if isinstance(value, (float, np.floating)):
        return float(value).is_integer()
    return False


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(
        value, (bool, np.bool_)
    )


@dataclass(frozen=True)
class DiscreteSpace:
    """Finite choice space over {0, ..., n-1}."""

    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise SpaceError(f"discrete space requires integer n >= 1, got {self.n!r}")

    @property
    def kind(self) -> str:
        return "discrete"

    def contains(self, value: Any) -> bool:
        return _is_integral(value) and 0 <= int(value) < self.n

    def canonical(self, value: Any) -> int:
        if not self.contains(value):
            raise SpaceError(f"value {value!r} not in discrete({self.n})")
        return int(value)

    def to_json(self) -> dict:
        return {"kind": "discrete", "n": self.n}


@dataclass(frozen=True)
class BoxSpace:
    """Axis-aligned box of real vectors with inclusive elementwise bounds."""

    low: tuple[float, ...]
    high: tuple[float, ...]

    def __post_init__(self) -> None:
        low = tuple(float(x) for x in self.low)
        high = tuple(float(x) for x in self.high)
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)
        if len(low) != len(high):
            raise SpaceError(f"box bounds disagree on dimension: {len(low)} vs {len(high)}")
        if not low:
            raise SpaceError("box space needs at least one dimension")
        for i, (lo, hi) in enumerate(zip(low, high)):
            if not np.isfinite(lo) or not np.isfinite(hi):
                raise SpaceError(f"box bound at dim {i} is not finite")
            if lo > hi:
                raise SpaceError(f"box bound at dim {i} has low {lo} > high {hi}")

    @property
    def kind(self) -> str:
        return "box"

    @property
    def dim(self) -> int:
        return len(self.low)

    def contains(self, value: Any) -> bool:
        if _is_number(value):
            value = [value]
        if not isinstance(value, (list, tuple, np.ndarray)):
            return False
        arr = list(value)
        if len(arr) != self.dim or not all(_is_number(x) for x in arr):
            return False
        return all(lo <= float(x) <= hi for x, lo, hi in zip(arr, self.low, self.high))

    def canonical(self, value: Any) -> tuple[float, ...]:
        if not self.contains(value):
            raise SpaceError(f"value {value!r} not in box(dim={self.dim})")
        if _is_number(value):
            value = [value]
        return tuple(float(x) for x in value)

    def to_json(self) -> dict:
        return {"kind": "box", "low": list(self.low), "high": list(self.high)}


Space = Union[DiscreteSpace, BoxSpace]


def space_from_json(obj: Any, *, where: str = "space") -> Space:
    """Parse a space description from its JSON form, naming `where` in errors."""
    if not isinstance(obj, dict):
        raise SpaceError(f"{where}: expected an object, got {type(obj).__name__}")
    kind = obj.get("kind")
    if kind == "discrete":
        if "n" not in obj:
            raise SpaceError(f"{where}: discrete space missing field 'n'")
        n = obj["n"]
        if not _is_integral(n):
            raise SpaceError(f"{where}: discrete 'n' must be an integer, got {n!r}")
        try:
            return DiscreteSpace(int(n))
        except SpaceError as exc:
            raise SpaceError(f"{where}: {exc}") from exc
    if kind == "box":
        for field in ("low", "high"):
            if field not in obj:
                raise SpaceError(f"{where}: box space missing field '{field}'")
            if not isinstance(obj[field], (list, tuple)):
                raise SpaceError(f"{where}: box '{field}' must be a list")
        try:
            return BoxSpace(tuple(obj["low"]), tuple(obj["high"]))
        except SpaceError as exc:
            raise SpaceError(f"{where}: {exc}") from exc
    raise SpaceError(f"{where}: unknown space kind {kind!r}")


def space_to_json(space: Space) -> dict:
    return space.to_json()
