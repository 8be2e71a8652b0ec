"""Classification sweep: twelve hand-written misbehaving programs, each mapped
to its expected error class through the real worker process."""

from __future__ import annotations

import pytest

from harness import WorkerProcess

GOOD_STEP_BODY = "    def set_state(self, state):\n        pass\n"

MISBEHAVING = [
    (
        "unclosed-paren",
        "class Environment(\n    def set_state(self, state)\n",
        "load",
        "syntax",
        "line 1",
    ),
    (
        "no-entry-class",
        "x = 1\n",
        "load",
        "runtime",
        "missing member Environment",
    ),
    (
        "missing-step",
        "class Environment:\n    def set_state(self, state):\n        pass\n",
        "load",
        "runtime",
        "missing member step",
    ),
    (
        "missing-set-state",
        "class Environment:\n    def step(self, action):\n        return 0, 0.0, False\n",
        "load",
        "runtime",
        "missing member set_state",
    ),
    (
        "raising-init",
        "class Environment:\n    def __init__(self):\n        raise RuntimeError('boom at init')\n"
        + GOOD_STEP_BODY
        + "    def step(self, action):\n        return 0, 0.0, False\n",
        "load",
        "runtime",
        "boom at init",
    ),
    (
        "raising-step",
        "class Environment:\n"
        + GOOD_STEP_BODY
        + "    def step(self, action):\n        return 1 // 0, 0.0, False\n",
        "step",
        "runtime",
        "ZeroDivisionError",
    ),
    (
        "four-tuple-step",
        "class Environment:\n"
        + GOOD_STEP_BODY
        + "    def step(self, action):\n        return 0, 0.0, False, {}\n",
        "step",
        "runtime",
        "3-tuple",
    ),
    (
        "string-observation",
        "class Environment:\n"
        + GOOD_STEP_BODY
        + "    def step(self, action):\n        return 'left', 0.0, False\n",
        "step",
        "runtime",
        "non-numeric observation",
    ),
    (
        "boolean-observation",
        "class Environment:\n"
        + GOOD_STEP_BODY
        + "    def step(self, action):\n        return True, 0.0, False\n",
        "step",
        "runtime",
        "boolean observation",
    ),
    (
        "busy-loop-step",
        "class Environment:\n"
        + GOOD_STEP_BODY
        + "    def step(self, action):\n        x = 0\n        while True:\n            x += 1\n",
        "step",
        "timeout",
        "CPU budget",
    ),
    (
        "sleeping-step",
        "import time\nclass Environment:\n"
        + GOOD_STEP_BODY
        + "    def step(self, action):\n        time.sleep(30)\n        return 0, 0.0, False\n",
        "step",
        "timeout",
        "wall budget",
    ),
    (
        "allocation-bomb-step",
        "class Environment:\n"
        + GOOD_STEP_BODY
        + "    def step(self, action):\n"
        + "        data = []\n        while True:\n            data.append(bytearray(10 ** 7))\n",
        "step",
        "resource",
        "memory cap",
    ),
]


@pytest.fixture(scope="module")
def strict_worker():
    limits = {
        "cpu_seconds_per_call": 0.5,
        "batch_wall_seconds": 1.5,
        "memory_cap_bytes": 192 * 1024 * 1024,
    }
    with WorkerProcess(limits) as w:
        w.expect_ok("handshake", {"version": 1})
        yield w


@pytest.mark.parametrize("name,source,phase,expected_class,needle", MISBEHAVING, ids=[m[0] for m in MISBEHAVING])
def test_misbehaving_program_classification(strict_worker, name, source, phase, expected_class, needle):
    if phase == "load":
        error = strict_worker.expect_error("load", {"source": source})
    else:
        strict_worker.expect_ok("load", {"source": source})
        error = strict_worker.expect_error("step_from", {"s": 0, "a": 0})
    assert error["class"] == expected_class
    assert needle in error["message"]
    # The worker survives every one of these and keeps answering.
    assert strict_worker.expect_ok("handshake", {"version": 1}) == {"version": 1}


def test_twelve_programs_cover_the_sweep():
    assert len(MISBEHAVING) == 12
    assert {m[3] for m in MISBEHAVING} == {"syntax", "runtime", "timeout", "resource"}
