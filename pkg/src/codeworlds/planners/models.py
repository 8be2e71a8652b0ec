"""Adapters giving planners a uniform transition interface.

A model is anything with `step_from(state, action) -> (next_state, reward,
done)`. Program executors already satisfy this once a program is loaded; this
module adapts native environment objects to the same shape.
"""

from __future__ import annotations


class NativeModel:
    """Wrap an environment instance (set_state/step) as a planning model."""

    def __init__(self, env) -> None:
        self._env = env

    def step_from(self, state, action):
        self._env.set_state(state)
        return self._env.step(action)
