"""Run planning policies through real environments and score a learned model
by the return its planner earns, normalized between random and fully informed
planning."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from codeworlds.core.spaces import BoxSpace, DiscreteSpace, Space
from codeworlds.planners.models import NativeModel
from codeworlds.sandbox.errors import ExecError


class RandomPolicy:
    def __init__(self, action_space: Space, rng: np.random.Generator) -> None:
        self.action_space = action_space
        self.rng = rng

    def act(self, state):
        if isinstance(self.action_space, DiscreteSpace):
            return int(self.rng.integers(self.action_space.n))
        low = np.asarray(self.action_space.low, dtype=float)
        high = np.asarray(self.action_space.high, dtype=float)
        return [float(x) for x in self.rng.uniform(low, high)]


@dataclass
class EpisodeOutcome:
    total_reward: float
    steps: int
    reached_done: bool
    failed: bool = False
    failure: Optional[ExecError] = None

    def to_json(self) -> dict:
        return {
            "total_reward": self.total_reward,
            "steps": self.steps,
            "reached_done": self.reached_done,
            "failed": self.failed,
            "failure": self.failure.to_json() if self.failure else None,
        }


def run_episode(env, policy, max_steps: int = 100) -> EpisodeOutcome:
    """Roll one episode of `policy` in `env`; a model crash inside a planning
    policy ends the episode and marks it failed."""
    state = env.reset()
    total = 0.0
    for step in range(max_steps):
        try:
            action = policy.act(state)
        except ExecError as exc:
            return EpisodeOutcome(total, step, reached_done=False, failed=True, failure=exc)
        state, reward, done = env.step(action)
        total += float(reward)
        if done:
            return EpisodeOutcome(total, step + 1, reached_done=True)
    return EpisodeOutcome(total, max_steps, reached_done=False)


@dataclass
class CwmEvaluation:
    model_returns: list = field(default_factory=list)
    true_returns: list = field(default_factory=list)
    random_returns: list = field(default_factory=list)
    normalized_return: float = 0.0
    sem: float = 0.0
    model_unusable: bool = False
    episodes: int = 0

    def to_json(self) -> dict:
        return {
            "model_returns": self.model_returns,
            "true_returns": self.true_returns,
            "random_returns": self.random_returns,
            "normalized_return": self.normalized_return,
            "sem": self.sem,
            "model_unusable": self.model_unusable,
            "episodes": self.episodes,
        }


def evaluate_cwm(
    env_factory: Callable[[], object],
    model,
    planner_factory: Callable[[object, int], object],
    action_space: Space,
    episodes: int = 10,
    base_seed: int = 0,
    max_steps: int = 100,
) -> CwmEvaluation:
    """Score `model` by planned return against informed and random baselines.

    Each episode index seeds all three policies identically. The normalized
    return is (model - random) / (true - random) over mean episode returns;
    a model whose planner ever crashes scores 0 and is flagged unusable.
    """
    result = CwmEvaluation(episodes=episodes)
    for e in range(episodes):
        seed = base_seed + e
        random_policy = RandomPolicy(action_space, np.random.default_rng(seed))
        result.random_returns.append(run_episode(env_factory(), random_policy, max_steps).total_reward)

        true_planner = planner_factory(NativeModel(env_factory()), seed)
        result.true_returns.append(run_episode(env_factory(), true_planner, max_steps).total_reward)

        model_planner = planner_factory(model, seed)
        outcome = run_episode(env_factory(), model_planner, max_steps)
        if outcome.failed:
            result.model_unusable = True
        result.model_returns.append(outcome.total_reward)

    if result.model_unusable:
        result.normalized_return = 0.0
        result.sem = 0.0
        return result

    mean_model = float(np.mean(result.model_returns))
    mean_true = float(np.mean(result.true_returns))
    mean_random = float(np.mean(result.random_returns))
    denom = mean_true - mean_random
    if denom == 0.0:
        raise ValueError("degenerate normalization: informed and random planning tie")
    result.normalized_return = (mean_model - mean_random) / denom
    if episodes > 1:
        spread = float(np.std(result.model_returns, ddof=1))
        result.sem = spread / math.sqrt(episodes) / abs(denom)
    return result
