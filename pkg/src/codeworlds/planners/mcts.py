"""Tree-search planner for discrete action spaces.

Runs a fixed number of simulations through the model from the current state,
expanding untried actions first (in index order) and otherwise following an
upper-confidence rule, with uniformly random rollouts below the tree. The
returned action is sampled from a low-temperature softmax over the root
children's mean returns, so ties stay stochastic but clear winners are all
but deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from codeworlds.core.spaces import DiscreteSpace
from codeworlds.sandbox.errors import ExecError


@dataclass(frozen=True)
class MctsConfig:
    iterations: int = 25
    max_actions: int = 100
    exploration_c: float = 1.0
    exploration_epsilon: float = 1.0
    gamma: float = 0.99
    temperature: float = 0.01

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.max_actions < 1:
            raise ValueError("max_actions must be >= 1")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")


class _PlanNode:
    __slots__ = ("state", "done", "visits", "value_sum", "children", "untried")

    def __init__(self, state, done: bool, n_actions: int) -> None:
        self.state = state
        self.done = done
        self.visits = 0
        self.value_sum = 0.0
        # action -> (child node, edge reward)
        self.children: dict[int, tuple[_PlanNode, float]] = {}
        self.untried: list[int] = [] if done else list(range(n_actions))

    @property
    def mean(self) -> float:
        return self.value_sum / self.visits if self.visits else 0.0


class MctsPlanner:
    """Plan one action at a time by simulated lookahead through a model."""

    def __init__(self, model, action_space: DiscreteSpace, config: MctsConfig | None = None, seed: int = 0) -> None:
        if not isinstance(action_space, DiscreteSpace):
            raise TypeError("tree-search planning requires a discrete action space")
        self.model = model
        self.n_actions = action_space.n
        self.config = config or MctsConfig()
        self.rng = np.random.default_rng(seed)

    def act(self, state) -> int:
        root = self.plan(state)
        if not root.children:
            return 0
        actions, probs = self.action_probabilities(root)
        return int(self.rng.choice(actions, p=probs))

    def plan(self, state) -> _PlanNode:
        """Run the configured number of simulations and return the root node."""
        root = _PlanNode(state, done=False, n_actions=self.n_actions)
        for _ in range(self.config.iterations):
            self._simulate(root)
        return root

    def action_probabilities(self, root: _PlanNode) -> tuple[list[int], np.ndarray]:
        """Softmax over the mean return of each tried root action."""
        actions = sorted(root.children)
        means = np.array([root.children[a][0].mean for a in actions], dtype=float)
        scaled = (means - means.max()) / self.config.temperature
        weights = np.exp(scaled)
        return actions, weights / weights.sum()

    def _simulate(self, root: _PlanNode) -> None:
        config = self.config
        node = root
        path: list[tuple[_PlanNode, float]] = []  # (child stepped into, edge reward)
        tail_return = 0.0
        while True:
            if node.done:
                break
            if node.untried:
                action = node.untried.pop(0)
                try:
                    next_state, reward, done = self.model.step_from(node.state, action)
                except ExecError:
                    # A model crash makes this branch worthless: terminal, zero value.
                    child = _PlanNode(None, done=True, n_actions=self.n_actions)
                    node.children[action] = (child, 0.0)
                    path.append((child, 0.0))
                    break
                child = _PlanNode(next_state, bool(done), self.n_actions)
                node.children[action] = (child, float(reward))
                path.append((child, float(reward)))
                if not child.done:
                    tail_return = self._rollout(next_state, config.max_actions - len(path))
                break
            best_action = None
            best_score = float("-inf")
            for action in sorted(node.children):
                child, _ = node.children[action]
                bonus = config.exploration_c * math.sqrt(
                    math.log(node.visits) / (child.visits + config.exploration_epsilon)
                )
                score = child.mean + bonus
                if score > best_score:
                    best_score = score
                    best_action = action
            child, reward = node.children[best_action]
            path.append((child, reward))
            node = child
            if len(path) >= config.max_actions:
                break
        backed = tail_return
        for child, reward in reversed(path):
            backed = reward + config.gamma * backed
            child.visits += 1
            child.value_sum += backed
        root.visits += 1

    def _rollout(self, state, budget: int) -> float:
        total = 0.0
        discount = 1.0
        for _ in range(max(0, budget)):
            action = int(self.rng.integers(self.n_actions))
            try:
                state, reward, done = self.model.step_from(state, action)
            except ExecError:
                break
            total += discount * float(reward)
            discount *= self.config.gamma
            if done:
                break
        return total
