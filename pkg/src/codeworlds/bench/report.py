"""Aggregate run manifests into a results table (JSON, CSV, aligned text)."""

from __future__ import annotations

import csv
import io
from typing import Optional, Sequence

from codeworlds.bench.runs import RunManifest

ROW_FIELDS = (
    "method",
    "task",
    "task_kind",
    "accuracy",
    "normalized_return",
    "return_sem",
    "llm_calls_used",
    "wall_time_seconds",
)


def _row_from_manifest(manifest: RunManifest) -> dict:
    results = manifest.results or {}
    return {
        "method": manifest.method,
        "task": manifest.task,
        "task_kind": manifest.task_kind,
        "accuracy": results.get("accuracy"),
        "normalized_return": results.get("normalized_return"),
        "return_sem": results.get("return_sem"),
        "llm_calls_used": results.get("llm_calls_used"),
        "wall_time_seconds": manifest.wall_time_seconds,
    }


def _mean(values: list) -> Optional[float]:
    numbers = [float(v) for v in values if v is not None]
    return sum(numbers) / len(numbers) if numbers else None


def build_report(manifests: Sequence[RunManifest]) -> dict:
    """One row per manifest plus per-action-space-kind mean rows."""
    rows = [_row_from_manifest(m) for m in manifests]
    aggregates = []
    for kind in sorted({row["task_kind"] for row in rows}):
        bucket = [row for row in rows if row["task_kind"] == kind]
        aggregates.append(
            {
                "task_kind": kind,
                "runs": len(bucket),
                "accuracy": _mean([row["accuracy"] for row in bucket]),
                "normalized_return": _mean([row["normalized_return"] for row in bucket]),
                "llm_calls_used": _mean([row["llm_calls_used"] for row in bucket]),
                "wall_time_seconds": _mean([row["wall_time_seconds"] for row in bucket]),
            }
        )
    return {"rows": rows, "aggregates": aggregates}


def _fmt(value, digits: int = 4) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.{digits}f}"
    return str(value)


def report_to_csv(report: dict) -> str:
    """Rows first, then one `aggregate` row per action-space kind."""
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=ROW_FIELDS)
    writer.writeheader()
    for row in report["rows"]:
        writer.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in ROW_FIELDS})
    for agg in report["aggregates"]:
        writer.writerow(
            {
                "method": "aggregate",
                "task": f"mean over {agg['runs']} runs",
                "task_kind": agg["task_kind"],
                "accuracy": "" if agg["accuracy"] is None else agg["accuracy"],
                "normalized_return": "" if agg["normalized_return"] is None else agg["normalized_return"],
                "return_sem": "",
                "llm_calls_used": "" if agg["llm_calls_used"] is None else agg["llm_calls_used"],
                "wall_time_seconds": "" if agg["wall_time_seconds"] is None else agg["wall_time_seconds"],
            }
        )
    return out.getvalue()


def render_report_table(report: dict) -> str:
    """Fixed-width text table: per-run rows, a rule, then per-kind means."""
    header = ("method", "task", "kind", "accuracy", "return", "sem", "calls", "wall s")
    lines_data: list[tuple[str, ...]] = [header]
    for row in report["rows"]:
        lines_data.append(
            (
                row["method"],
                row["task"],
                row["task_kind"],
                _fmt(row["accuracy"]),
                _fmt(row["normalized_return"]),
                _fmt(row["return_sem"]),
                _fmt(row["llm_calls_used"]),
                _fmt(row["wall_time_seconds"], 2),
            )
        )
    rule_at = len(lines_data)
    for agg in report["aggregates"]:
        lines_data.append(
            (
                "aggregate",
                f"mean over {agg['runs']} runs",
                agg["task_kind"],
                _fmt(agg["accuracy"]),
                _fmt(agg["normalized_return"]),
                "-",
                _fmt(agg["llm_calls_used"], 1),
                _fmt(agg["wall_time_seconds"], 2),
            )
        )
    widths = [max(len(row[i]) for row in lines_data) for i in range(len(header))]
    rendered = []
    for i, row in enumerate(lines_data):
        if i in (1, rule_at):
            rendered.append("  ".join("-" * w for w in widths))
        rendered.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
    return "\n".join(rendered)
