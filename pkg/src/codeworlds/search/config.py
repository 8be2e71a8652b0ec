"""Search configuration and ablations."""

from __future__ import annotations

from dataclasses import dataclass, field

ACTION_TYPES = ("generate", "improve", "fix")

ABLATIONS = ("no-generate", "no-improve", "no-fix")


@dataclass(frozen=True)
class SearchConfig:
    """Hyperparameters of the code-action tree search."""

    budget: int = 10
    lines_per_node: int = 2
    exploration_c: float = 0.1
    exploration_epsilon: float = 1.0
    gamma: float = 1.0
    prior_generate: tuple[float, int] = (0.5, 2)
    prior_improve: tuple[float, int] = (0.55, 2)
    max_fix_chain: int = 3
    enabled_actions: frozenset[str] = frozenset(ACTION_TYPES)
    estimator_learning_rate: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.lines_per_node < 1:
            raise ValueError("lines_per_node must be >= 1")
        if self.exploration_c < 0:
            raise ValueError("exploration_c must be >= 0")
        if self.exploration_epsilon <= 0:
            raise ValueError("exploration_epsilon must be > 0")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.max_fix_chain < 1:
            raise ValueError("max_fix_chain must be >= 1")
        actions = frozenset(self.enabled_actions)
        object.__setattr__(self, "enabled_actions", actions)
        if not actions:
            raise ValueError("enabled_actions must be non-empty")
        unknown = actions - set(ACTION_TYPES)
        if unknown:
            raise ValueError(f"unknown actions in enabled_actions: {sorted(unknown)}")
        for name in ("prior_generate", "prior_improve"):
            value, count = getattr(self, name)
            if not 0.0 <= value <= 1.0 or count < 0:
                raise ValueError(f"{name} must be (value in [0,1], count >= 0)")

    def to_json(self) -> dict:
        return {
            "budget": self.budget,
            "lines_per_node": self.lines_per_node,
            "exploration_c": self.exploration_c,
            "exploration_epsilon": self.exploration_epsilon,
            "gamma": self.gamma,
            "prior_generate": list(self.prior_generate),
            "prior_improve": list(self.prior_improve),
            "max_fix_chain": self.max_fix_chain,
            "enabled_actions": sorted(self.enabled_actions),
            "estimator_learning_rate": self.estimator_learning_rate,
            "seed": self.seed,
        }


def ablation_actions(name: str) -> frozenset[str]:
    """Map an ablation name to the action set it leaves enabled.

    Under no-generate the root still bootstraps one generated program; the
    search simply never offers generate arms below the root.
    """
    if name not in ABLATIONS:
        raise ValueError(f"unknown ablation {name!r} (known: {', '.join(ABLATIONS)})")
    removed = name.split("-", 1)[1]
    return frozenset(a for a in ACTION_TYPES if a != removed)
