"""Dataset ingestion, run orchestration, persistence and reporting."""

from codeworlds.bench.ingest import (
    IngestError,
    ingest_environment,
    ingest_io_problem,
    write_environment,
    write_io_problem,
)
from codeworlds.bench.report import build_report, render_report_table, report_to_csv
from codeworlds.bench.runs import (
    RunManifest,
    backend_fingerprint,
    load_manifest,
    iter_manifests,
    new_run_dir,
    write_json_atomic,
    write_text_atomic,
)
from codeworlds.bench.runner import (
    RunnerError,
    run_apps_eval,
    run_evaluate,
    run_plan,
    run_report,
    run_synthesize,
)

__all__ = [
    "IngestError",
    "RunManifest",
    "RunnerError",
    "backend_fingerprint",
    "build_report",
    "ingest_environment",
    "ingest_io_problem",
    "iter_manifests",
    "load_manifest",
    "new_run_dir",
    "render_report_table",
    "report_to_csv",
    "run_apps_eval",
    "run_evaluate",
    "run_plan",
    "run_report",
    "run_synthesize",
    "write_environment",
    "write_io_problem",
    "write_json_atomic",
    "write_text_atomic",
]
