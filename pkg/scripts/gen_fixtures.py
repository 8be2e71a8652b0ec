#!/usr/bin/env python3
"""Regenerate the trajectory buffers for the bundled fixture environments.

Writes fixtures/<name>/buffer.jsonl deterministically (fixed seeds): a few
uniformly random episodes for coverage plus a few noisy goal-seeking
demonstrations so every buffer contains terminal transitions. The curated
files (description.md, spaces.json, transition_table.json, solution.py) are
never touched.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

from codeworlds.envs.fixtures import LineWorld, MiniCliff

MAX_STEPS = 30

# Noisy-demonstration action preference per state (MiniCliff): skirt the cliff
# along the middle row, then drop into the goal.
CLIFF_DEMO_POLICY = {0: 1, 1: 1, 2: 1, 3: 2, 4: 1, 5: 1, 6: 1, 7: 2, 8: 0, 9: 0, 10: 0, 11: 1}


def rollout(env, pick_action, rng, max_steps=MAX_STEPS):
    transitions = []
    state = env.reset()
    for _ in range(max_steps):
        action = pick_action(state, rng)
        next_state, reward, done = env.step(action)
        transitions.append({"s": int(state), "a": int(action), "r": float(reward),
                            "s_next": int(next_state), "d": bool(done)})
        state = next_state
        if done:
            break
    return transitions


def lineworld_rows(rng):
    env = LineWorld()
    rows = []
    for _ in range(5):
        rows += rollout(env, lambda s, r: int(r.integers(2)), rng)
    for _ in range(5):
        rows += rollout(env, lambda s, r: 1 if r.random() < 0.85 else 0, rng)
    return rows


def minicliff_rows(rng):
    env = MiniCliff()
    rows = []
    for _ in range(5):
        rows += rollout(env, lambda s, r: int(r.integers(4)), rng, max_steps=25)
    for _ in range(5):
        rows += rollout(
            env,
            lambda s, r: int(r.integers(4)) if r.random() < 0.25 else CLIFF_DEMO_POLICY[s],
            rng,
        )
    return rows


def write_buffer(root: Path, name: str, rows) -> None:
    target = root / name / "buffer.jsonl"
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row) + "\n")
    goals = sum(1 for row in rows if row["d"])
    print(f"{target}: {len(rows)} transitions, {goals} terminal")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--root", default="fixtures", help="fixtures directory")
    args = parser.parse_args()
    root = Path(args.root)
    write_buffer(root, "lineworld", lineworld_rows(np.random.default_rng(7)))
    write_buffer(root, "minicliff", minicliff_rows(np.random.default_rng(11)))


if __name__ == "__main__":
    main()
