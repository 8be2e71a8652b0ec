"""Value prediction for unexplored arms.

Each action type keeps a prior-seeded global running mean of observed values
plus a local/global weighting learned online: the estimate is
(w_g * global + w_l * local) / (w_g + w_l), and after every observed expansion
one gradient step on the squared error adjusts the two weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from codeworlds.search.config import ACTION_TYPES, SearchConfig

MIN_WEIGHT_SUM = 1e-6


@dataclass
class _TypeModel:
    value_sum: float
    value_count: float
    w_global: float = 1.0
    w_local: float = 1.0

    @property
    def global_mean(self) -> float:
        return self.value_sum / self.value_count if self.value_count > 0 else 0.5


@dataclass(frozen=True)
class EstimatorInputs:
    """The (global, local) pair an estimate was computed from, kept for the update step."""

    v_global: float
    v_local: float


class ValueEstimator:
    """Per-action-type value model for scoring unexpanded arms."""

    def __init__(self, config: SearchConfig):
        priors = {
            "generate": config.prior_generate,
            "improve": config.prior_improve,
            # Fix arms are never in competition (buggy nodes hold exactly one
            # arm), so their prior only keeps the estimate well-defined.
            "fix": config.prior_generate,
        }
        self.learning_rate = config.estimator_learning_rate
        self.models = {
            action: _TypeModel(value_sum=value * count, value_count=float(count))
            for action, (value, count) in priors.items()
        }
        self.training_log: list[dict] = []

    def global_mean(self, action: str) -> float:
        return self.models[action].global_mean

    def weights(self, action: str) -> tuple[float, float]:
        model = self.models[action]
        return model.w_global, model.w_local

    def predict(self, action: str, v_global: float, v_local: float) -> float:
        model = self.models[action]
        denom = max(model.w_global + model.w_local, MIN_WEIGHT_SUM)
        estimate = (model.w_global * v_global + model.w_local * v_local) / denom
        return min(max(estimate, 0.0), 1.0)

    def estimate(self, action: str, local_values: Sequence[float]) -> tuple[float, EstimatorInputs]:
        """Estimate the value of an unexpanded arm; local falls back to global."""
        if action not in ACTION_TYPES:
            raise ValueError(f"unknown action {action!r}")
        v_global = self.global_mean(action)
        v_local = sum(local_values) / len(local_values) if local_values else v_global
        return self.predict(action, v_global, v_local), EstimatorInputs(v_global, v_local)

    def update(self, action: str, inputs: EstimatorInputs, observed: float) -> None:
        """One gradient step on (prediction - observed)^2, then record the observation."""
        model = self.models[action]
        v_g, v_l = inputs.v_global, inputs.v_local
        denom = max(model.w_global + model.w_local, MIN_WEIGHT_SUM)
        prediction = (model.w_global * v_g + model.w_local * v_l) / denom
        err = prediction - observed
        denom_sq = denom * denom
        grad_g = 2.0 * err * model.w_local * (v_g - v_l) / denom_sq
        grad_l = 2.0 * err * model.w_global * (v_l - v_g) / denom_sq
        model.w_global = max(model.w_global - self.learning_rate * grad_g, 0.0)
        model.w_local = max(model.w_local - self.learning_rate * grad_l, 0.0)
        if model.w_global + model.w_local < MIN_WEIGHT_SUM:
            model.w_global = model.w_local = MIN_WEIGHT_SUM / 2
        model.value_sum += observed
        model.value_count += 1.0
        self.training_log.append(
            {
                "action": action,
                "v_global": v_g,
                "v_local": v_l,
                "observed": observed,
                "prediction": prediction,
            }
        )
