"""Load environment tasks and input/output problems from on-disk layouts.

An environment directory holds `description.md`, `spaces.json` and
`buffer.jsonl`; a problem directory holds `statement.md` and `tests.jsonl`.
All schema errors name the offending file, line and field.
"""

from __future__ import annotations

import json
from pathlib import Path

from codeworlds.core.spaces import SpaceError, space_from_json, space_to_json
from codeworlds.core.types import EnvTask, IOProblem, ReplayBuffer, Transition, UnitTestCase

TRANSITION_FIELDS = ("s", "a", "r", "s_next", "d")


class IngestError(ValueError):
    """A task directory violated the expected layout or schema."""


def _require_dir(path: Path) -> None:
    if not path.is_dir():
        raise IngestError(f"no such directory: {path}")


def _require_file(dirpath: Path, name: str) -> Path:
    target = dirpath / name
    if not target.is_file():
        raise IngestError(f"{dirpath}: missing {name}")
    return target


def _read_json_lines(path: Path) -> list[tuple[int, dict]]:
    rows = []
    with path.open("r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{path.name} line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise IngestError(f"{path.name} line {lineno}: expected a JSON object")
            rows.append((lineno, obj))
    return rows


def ingest_environment(dirpath: str | Path) -> EnvTask:
    """Read an environment directory into a validated task."""
    root = Path(dirpath)
    _require_dir(root)
    description = _require_file(root, "description.md").read_text(encoding="utf-8")
    if not description.strip():
        raise IngestError(f"{root / 'description.md'}: file is empty")

    spaces_path = _require_file(root, "spaces.json")
    try:
        spaces_obj = json.loads(spaces_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise IngestError(f"spaces.json: invalid JSON ({exc.msg})") from exc
    if not isinstance(spaces_obj, dict):
        raise IngestError("spaces.json: expected a JSON object")
    for key in ("action", "observation"):
        if key not in spaces_obj:
            raise IngestError(f"spaces.json: missing field '{key}'")
    try:
        action_space = space_from_json(spaces_obj["action"], where="spaces.json field 'action'")
        observation_space = space_from_json(spaces_obj["observation"], where="spaces.json field 'observation'")
    except SpaceError as exc:
        raise IngestError(str(exc)) from exc

    buffer_path = _require_file(root, "buffer.jsonl")
    transitions = []
    for lineno, row in _read_json_lines(buffer_path):
        where = f"buffer.jsonl line {lineno}"
        for fieldname in TRANSITION_FIELDS:
            if fieldname not in row:
                raise IngestError(f"{where}: missing field '{fieldname}'")
        transition = Transition(s=row["s"], a=row["a"], r=row["r"], s_next=row["s_next"], d=row["d"])
        try:
            transition.validate(observation_space, action_space, where=where)
        except SpaceError as exc:
            raise IngestError(str(exc)) from exc
        transitions.append(transition)
    if not transitions:
        raise IngestError(f"{buffer_path}: no transitions")

    return EnvTask(
        name=root.name,
        description=description,
        observation_space=observation_space,
        action_space=action_space,
        buffer=ReplayBuffer(tuple(transitions), source=str(root)),
    )


def write_environment(dirpath: str | Path, task: EnvTask) -> None:
    """Write a task back to the directory layout `ingest_environment` reads."""
    root = Path(dirpath)
    root.mkdir(parents=True, exist_ok=True)
    (root / "description.md").write_text(task.description, encoding="utf-8")
    spaces = {
        "action": space_to_json(task.action_space),
        "observation": space_to_json(task.observation_space),
    }
    (root / "spaces.json").write_text(json.dumps(spaces, indent=2) + "\n", encoding="utf-8")
    with (root / "buffer.jsonl").open("w", encoding="utf-8") as handle:
        for transition in task.buffer:
            handle.write(json.dumps(transition.to_json()) + "\n")


def ingest_io_problem(dirpath: str | Path) -> IOProblem:
    """Read a problem directory into a validated stdin/stdout problem."""
    root = Path(dirpath)
    _require_dir(root)
    statement = _require_file(root, "statement.md").read_text(encoding="utf-8")
    if not statement.strip():
        raise IngestError(f"{root / 'statement.md'}: file is empty")

    tests_path = _require_file(root, "tests.jsonl")
    cases = []
    for lineno, row in _read_json_lines(tests_path):
        where = f"tests.jsonl line {lineno}"
        for fieldname in ("stdin", "stdout"):
            if fieldname not in row:
                raise IngestError(f"{where}: missing field '{fieldname}'")
            if not isinstance(row[fieldname], str):
                raise IngestError(f"{where}: field '{fieldname}' must be a string")
        cases.append(UnitTestCase(stdin=row["stdin"], expected_stdout=row["stdout"]))
    if not cases:
        raise IngestError(f"{tests_path}: zero tests")

    return IOProblem(name=root.name, statement=statement, cases=tuple(cases))


def write_io_problem(dirpath: str | Path, problem: IOProblem) -> None:
    """Write a problem back to the directory layout `ingest_io_problem` reads."""
    root = Path(dirpath)
    root.mkdir(parents=True, exist_ok=True)
    (root / "statement.md").write_text(problem.statement, encoding="utf-8")
    with (root / "tests.jsonl").open("w", encoding="utf-8") as handle:
        for case in problem.cases:
            handle.write(json.dumps({"stdin": case.stdin, "stdout": case.expected_stdout}) + "\n")
