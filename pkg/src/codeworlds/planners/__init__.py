"""Model-based planning: tree search for discrete actions, cross-entropy
optimization for continuous ones, and episode-level evaluation of a learned
model against the real environment."""

from codeworlds.planners.cem import CemConfig, CemPlanner
from codeworlds.planners.episodes import (
    CwmEvaluation,
    EpisodeOutcome,
    RandomPolicy,
    evaluate_cwm,
    run_episode,
)
from codeworlds.planners.mcts import MctsConfig, MctsPlanner
from codeworlds.planners.models import NativeModel

__all__ = [
    "CemConfig",
    "CemPlanner",
    "CwmEvaluation",
    "EpisodeOutcome",
    "MctsConfig",
    "MctsPlanner",
    "NativeModel",
    "RandomPolicy",
    "evaluate_cwm",
    "run_episode",
]
