"""Throughput and kill-deadline guarantees: a big batch stays fast, runaway
candidates are cut off inside the promised window, and the worker survives."""

from __future__ import annotations

import random
import time

from harness import WorkerProcess

from cwm_worker.fixture_envs import LINEWORLD_SOURCE

BUSY_LOOP_SOURCE = (
    "class Environment:\n"
    "    def set_state(self, state):\n"
    "        pass\n"
    "    def step(self, action):\n"
    "        x = 0\n"
    "        while True:\n"
    "            x += 1\n"
)


def test_thousand_transition_batch_under_five_seconds(worker):
    worker.expect_ok("load", {"source": LINEWORLD_SOURCE})
    rng = random.Random(77)
    items = [{"s": rng.randrange(10), "a": rng.randrange(2)} for _ in range(1000)]
    start = time.perf_counter()
    results = worker.expect_ok("predict_batch", {"items": items})["results"]
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0
    assert len(results) == 1000
    assert all(item["ok"] for item in results)


def test_cpu_hog_reported_within_the_kill_window():
    wall_timeout = 3.0
    limits = {"cpu_seconds_per_call": 1.0, "batch_wall_seconds": wall_timeout}
    with WorkerProcess(limits) as worker:
        worker.expect_ok("load", {"source": BUSY_LOOP_SOURCE})
        start = time.perf_counter()
        error = worker.expect_error("step_from", {"s": 0, "a": 0})
        elapsed = time.perf_counter() - start
        assert error["class"] == "timeout"
        assert elapsed < wall_timeout + 1.0
        # The offending call is contained; the worker keeps serving.
        assert worker.expect_ok("handshake", {"version": 1}) == {"version": 1}


def test_per_item_timeouts_do_not_abort_the_batch():
    limits = {"cpu_seconds_per_call": 0.3, "batch_wall_seconds": 10.0}
    source = (
        "class Environment:\n"
        "    def set_state(self, state):\n"
        "        self.s = state\n"
        "    def step(self, action):\n"
        "        if action == 99:\n"
        "            while True:\n"
        "                pass\n"
        "        return self.s, 0.0, False\n"
    )
    with WorkerProcess(limits) as worker:
        worker.expect_ok("load", {"source": source})
        items = [{"s": 1, "a": 0}, {"s": 2, "a": 99}, {"s": 3, "a": 0}]
        results = worker.expect_ok("predict_batch", {"items": items})["results"]
        assert [item["ok"] for item in results] == [True, False, True]
        assert results[1]["error"]["class"] == "timeout"
        assert results[0]["s_next"] == 1 and results[2]["s_next"] == 3


def test_io_case_timeout_is_per_case(worker):
    source = "import sys\nline = input()\nif line == 'spin':\n    while True:\n        pass\nprint(line)\n"
    results = worker.expect_ok(
        "run_io", {"source": source, "cases": ["ok\n", "spin\n", "fine\n"], "timeout": 0.4}
    )["results"]
    assert [item["ok"] for item in results] == [True, False, True]
    assert results[0]["stdout"] == "ok\n"
    assert results[1]["error"]["class"] == "timeout"
    assert results[2]["stdout"] == "fine\n"
