"""Run directories, immutable manifests, and atomic results persistence.

Every command that produces results creates `<out>/<timestamp>-<method>-<task>/`
holding a `manifest.json` that names every other file in the directory. Files
are written to a temporary sibling and renamed into place so readers never see
a partial file.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator, Optional

MANIFEST_NAME = "manifest.json"


def _slug(text: str) -> str:
    cleaned = re.sub(r"[^A-Za-z0-9._-]+", "-", text.strip()).strip("-")
    return cleaned.lower() or "run"


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


def new_run_dir(root: str | Path, method: str, task: str, now: Optional[datetime] = None) -> Path:
    """Create and return a fresh run directory under `root`."""
    stamp = (now or _utc_now()).strftime("%Y%m%d-%H%M%S")
    base = Path(root) / f"{stamp}-{_slug(method)}-{_slug(task)}"
    candidate = base
    suffix = 2
    while candidate.exists():
        candidate = base.with_name(f"{base.name}-{suffix}")
        suffix += 1
    candidate.mkdir(parents=True)
    return candidate


def _atomic_write(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        "w", encoding="utf-8", dir=path.parent, prefix=f".{path.name}.", delete=False
    )
    try:
        handle.write(data)
        handle.flush()
        os.fsync(handle.fileno())
        handle.close()
        os.replace(handle.name, path)
    except BaseException:
        handle.close()
        os.unlink(handle.name)
        raise


def write_text_atomic(path: str | Path, text: str) -> None:
    _atomic_write(Path(path), text)


def write_json_atomic(path: str | Path, obj) -> None:
    _atomic_write(Path(path), json.dumps(obj, indent=2, sort_keys=True) + "\n")


def backend_fingerprint(described: dict) -> str:
    """Stable hash of a credential-free backend description."""
    digest = hashlib.sha256(json.dumps(described, sort_keys=True).encode("utf-8")).hexdigest()
    return f"sha256:{digest}"


@dataclass
class RunManifest:
    """Immutable record of one command run and the files it produced."""

    method: str
    task: str
    task_kind: str  # discrete | continuous | io
    budget: Optional[int]
    seed: Optional[int]
    backend_hash: Optional[str]
    config: dict = field(default_factory=dict)
    created_at: str = ""
    wall_time_seconds: float = 0.0
    artifacts: dict = field(default_factory=dict)  # label -> relative path
    results: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "task": self.task,
            "task_kind": self.task_kind,
            "budget": self.budget,
            "seed": self.seed,
            "backend_hash": self.backend_hash,
            "config": self.config,
            "created_at": self.created_at,
            "wall_time_seconds": self.wall_time_seconds,
            "artifacts": self.artifacts,
            "results": self.results,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RunManifest":
        return cls(
            method=obj["method"],
            task=obj["task"],
            task_kind=obj["task_kind"],
            budget=obj.get("budget"),
            seed=obj.get("seed"),
            backend_hash=obj.get("backend_hash"),
            config=obj.get("config", {}),
            created_at=obj.get("created_at", ""),
            wall_time_seconds=obj.get("wall_time_seconds", 0.0),
            artifacts=obj.get("artifacts", {}),
            results=obj.get("results", {}),
        )


def write_manifest(run_dir: str | Path, manifest: RunManifest) -> Path:
    """Write the manifest exactly once; a second write is a bug."""
    path = Path(run_dir) / MANIFEST_NAME
    if path.exists():
        raise FileExistsError(f"manifest already written: {path}")
    if not manifest.created_at:
        manifest.created_at = _utc_now().isoformat()
    write_json_atomic(path, manifest.to_json())
    return path


def load_manifest(path: str | Path) -> RunManifest:
    return RunManifest.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def iter_manifests(root: str | Path) -> Iterator[tuple[Path, RunManifest]]:
    """Yield (run_dir, manifest) for every run under `root`, oldest first."""
    base = Path(root)
    if not base.is_dir():
        return
    for manifest_path in sorted(base.glob(f"*/{MANIFEST_NAME}")):
        yield manifest_path.parent, load_manifest(manifest_path)
