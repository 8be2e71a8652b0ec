"""Cross-entropy planner for continuous action spaces.

Optimizes an open-loop action sequence by iteratively sampling candidate
plans from a diagonal Gaussian, rolling each through the model, and refitting
the Gaussian to the top scorers. Executes the winning plan action by action
and solves again once it runs out.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from codeworlds.core.spaces import BoxSpace
from codeworlds.sandbox.errors import ExecError


@dataclass(frozen=True)
class CemConfig:
    horizon: int = 100
    iterations: int = 20
    population: int = 1000
    elites: int = 100
    std_floor: float = 1e-6

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 1 <= self.elites <= self.population:
            raise ValueError("elites must be in [1, population]")


class CemPlanner:
    """Plan with the cross-entropy method over fixed-horizon action sequences."""

    def __init__(self, model, action_space: BoxSpace, config: CemConfig | None = None, seed: int = 0) -> None:
        if not isinstance(action_space, BoxSpace):
            raise TypeError("cross-entropy planning requires a box action space")
        self.model = model
        self.config = config or CemConfig()
        self.low = np.asarray(action_space.low, dtype=float)
        self.high = np.asarray(action_space.high, dtype=float)
        self.dim = self.low.shape[0]
        self.init_std = np.maximum(np.abs(self.low), np.abs(self.high)) / 2.0
        self.rng = np.random.default_rng(seed)
        self._queue: list[np.ndarray] = []
        self.last_mean: Optional[np.ndarray] = None
        self.last_std: Optional[np.ndarray] = None

    def act(self, state) -> list[float]:
        if not self._queue:
            plan = self.solve(state)
            self._queue = [plan[t] for t in range(plan.shape[0])]
        action = self._queue.pop(0)
        return [float(x) for x in action]

    def solve(self, state) -> np.ndarray:
        """Return the best (horizon, dim) action sequence found."""
        config = self.config
        mean = np.zeros((config.horizon, self.dim))
        std = np.tile(self.init_std, (config.horizon, 1))
        samples = returns = None
        for _ in range(config.iterations):
            noise = self.rng.standard_normal((config.population, config.horizon, self.dim))
            samples = np.clip(mean + noise * std, self.low, self.high)
            returns = np.array([self._rollout(state, plan) for plan in samples])
            elite_idx = np.argsort(-returns, kind="stable")[: config.elites]
            elite = samples[elite_idx]
            mean = elite.mean(axis=0)
            std = np.maximum(elite.std(axis=0), config.std_floor)
        self.last_mean = mean
        self.last_std = std
        return samples[int(np.argmax(returns))]

    def _rollout(self, state, plan: np.ndarray) -> float:
        total = 0.0
        for row in plan:
            action = [float(x) for x in row]
            try:
                state, reward, done = self.model.step_from(state, action)
            except ExecError:
                break
            total += float(reward)
            if done:
                break
        return total
