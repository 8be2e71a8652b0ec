"""Baseline synthesis strategies: a Thompson-sampling bandit over whole
programs, and independent zero-shot sampling with chain-of-thought."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from codeworlds.core.types import ProgramSource
from codeworlds.evaluate import NodeEvaluation, format_error
from codeworlds.llm.gateway import GatewayError, LlmGateway
from codeworlds.llm.parsing import CodeParseError, parse_code
from codeworlds.llm.prompts import render_prompt, render_reasoning_prompt
from codeworlds.sandbox.errors import ExecError
from codeworlds.search.config import SearchConfig
from codeworlds.search.gif_mcts import PERFECT_VALUE, Expansion, SearchTrace

BETA_PRIOR_SCALE = 5.0


def beta_init(value: float) -> tuple[float, float]:
    """Initial Beta parameters for a program arm given its score in [0, 1]."""
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"value must be in [0, 1], got {value}")
    return 1.0 + BETA_PRIOR_SCALE * value, 1.0 + BETA_PRIOR_SCALE * (1.0 - value)


def thompson_select(params: list[tuple[float, float]], rng: np.random.Generator) -> int:
    """Index of the arm with the highest Beta(alpha, beta) draw."""
    if not params:
        raise ValueError("no arms to select from")
    draws = [rng.beta(alpha, beta) for alpha, beta in params]
    return int(np.argmax(draws))


@dataclass
class BanditArm:
    node_id: int
    parent_id: int
    action: str
    text: str
    value: float
    is_buggy: bool
    alpha: float
    beta: float
    evaluation: NodeEvaluation


def _evaluate_completion(completion: str, prefix: str, evaluator) -> tuple[str, NodeEvaluation]:
    try:
        code = parse_code(completion, prefix).replace("\r\n", "\n")
    except CodeParseError as exc:
        error = ExecError("syntax", f"no code block found in completion: {exc}")
        return completion.replace("\r\n", "\n"), NodeEvaluation(value=0.0, is_buggy=True, error=error)
    return code, evaluator.evaluate(code)


def _arm_context(arm: BanditArm, evaluator, description_key: str) -> tuple[str, dict]:
    """Pick the follow-up action for a sampled arm and build its prompt context."""
    context = {description_key: evaluator.description, "CODE": arm.text}
    if arm.is_buggy:
        if arm.evaluation.error is None:
            raise ValueError("buggy arm is missing its error payload")
        context["ERROR"] = format_error(arm.evaluation.error)
        return "fix", context
    context.update(evaluator.improve_context(arm.evaluation))
    return "improve", context


def run_worldcoder(task, config: SearchConfig, gateway: LlmGateway, evaluator) -> tuple[ProgramSource, SearchTrace]:
    """Bandit over complete programs: sample an arm, refine or repair it,
    insert the result as a new arm, and reward the sampled arm only when the
    refinement strictly improved on it."""
    rng = np.random.default_rng(config.seed)
    description_key = "ENV_DESCRIPTION" if evaluator.mode == "cwm" else "PROB_DESCRIPTION"
    trace = SearchTrace(method="worldcoder", seed=config.seed, config=config.to_json())
    arms: list[BanditArm] = []

    def record(text: str, evaluation: NodeEvaluation, parent_id: int, action: str) -> BanditArm:
        alpha, beta = beta_init(0.0 if evaluation.is_buggy else evaluation.value)
        arm = BanditArm(
            node_id=len(arms) + 1,
            parent_id=parent_id,
            action=action,
            text=text,
            value=0.0 if evaluation.is_buggy else evaluation.value,
            is_buggy=evaluation.is_buggy,
            alpha=alpha,
            beta=beta,
            evaluation=evaluation,
        )
        arms.append(arm)
        trace.expansions.append(
            Expansion(
                step=len(trace.expansions) + 1,
                node_id=arm.node_id,
                parent_id=parent_id,
                action=action,
                value=arm.value,
                is_buggy=arm.is_buggy,
            )
        )
        return arm

    while trace.llm_calls_used < config.budget:
        try:
            if not arms:
                context = {description_key: evaluator.description, "CODE_SO_FAR": ""}
                action, parent_id = "generate", 0
                parent: Optional[BanditArm] = None
            else:
                parent = arms[thompson_select([(arm.alpha, arm.beta) for arm in arms], rng)]
                action, context = _arm_context(parent, evaluator, description_key)
                parent_id = parent.node_id
            bundle = render_prompt(action, evaluator.mode, context)
            completion = gateway.complete(bundle)
        except GatewayError as exc:
            trace.aborted = f"gateway failure: {exc}"
            break
        trace.llm_calls_used += 1
        text, evaluation = _evaluate_completion(completion, bundle.assistant_prefix, evaluator)
        arm = record(text, evaluation, parent_id, action)
        if parent is not None:
            if arm.value > parent.value:
                parent.alpha += 1.0
            else:
                parent.beta += 1.0
        if not arm.is_buggy and arm.value >= PERFECT_VALUE:
            break

    return _finish(trace, arms)


def run_zero_shot(task, config: SearchConfig, gateway: LlmGateway, evaluator) -> tuple[ProgramSource, SearchTrace]:
    """Budget-many independent samples; keep the best-scoring program."""
    trace = SearchTrace(method="zero-shot-cot", seed=config.seed, config=config.to_json())
    arms: list[BanditArm] = []

    while trace.llm_calls_used < config.budget:
        if evaluator.mode == "io":
            bundle = render_reasoning_prompt(evaluator.description)
        else:
            context = {"ENV_DESCRIPTION": evaluator.description, "CODE_SO_FAR": ""}
            bundle = render_prompt("generate", "cwm", context)
        try:
            completion = gateway.complete(bundle)
        except GatewayError as exc:
            trace.aborted = f"gateway failure: {exc}"
            break
        trace.llm_calls_used += 1
        text, evaluation = _evaluate_completion(completion, bundle.assistant_prefix, evaluator)
        value = 0.0 if evaluation.is_buggy else evaluation.value
        arms.append(
            BanditArm(
                node_id=len(arms) + 1,
                parent_id=0,
                action="generate",
                text=text,
                value=value,
                is_buggy=evaluation.is_buggy,
                alpha=1.0,
                beta=1.0,
                evaluation=evaluation,
            )
        )
        trace.expansions.append(
            Expansion(
                step=len(trace.expansions) + 1,
                node_id=len(arms),
                parent_id=0,
                action="generate",
                value=value,
                is_buggy=evaluation.is_buggy,
            )
        )
        if not evaluation.is_buggy and evaluation.value >= PERFECT_VALUE:
            break

    return _finish(trace, arms)


def _finish(trace: SearchTrace, arms: list[BanditArm]) -> tuple[ProgramSource, SearchTrace]:
    healthy = [arm for arm in arms if not arm.is_buggy]
    pool = healthy or arms
    if not pool:
        trace.stats = _bandit_statistics(trace, arms, None)
        return ProgramSource(text="", valid=False), trace
    best = max(pool, key=lambda arm: (arm.value, -arm.node_id))
    trace.best_node_id = best.node_id
    trace.best_value = best.value if not best.is_buggy else None
    trace.best_program = best.text
    trace.stats = _bandit_statistics(trace, arms, best)
    program = ProgramSource(
        text=best.text,
        state_lines=tuple(best.text.split("\n")),
        rollout_lines=(),
        node_id=best.node_id,
        parent_id=best.parent_id,
        action=best.action,
        valid=not best.is_buggy,
    )
    return program, trace


def _bandit_statistics(trace: SearchTrace, arms: list[BanditArm], best: Optional[BanditArm]) -> dict:
    from codeworlds.search.config import ACTION_TYPES

    counts = {action: 0 for action in ACTION_TYPES}
    for expansion in trace.expansions:
        counts[expansion.action] += 1
    total = sum(counts.values())

    by_id = {arm.node_id: arm for arm in arms}
    path_counts = {action: 0 for action in ACTION_TYPES}
    path_length = 0
    node = best
    while node is not None:
        path_counts[node.action] += 1
        path_length += 1
        node = by_id.get(node.parent_id)

    def percentages(bucket: dict, denom: int) -> dict:
        if denom == 0:
            return {action: 0.0 for action in bucket}
        return {action: 100.0 * n / denom for action, n in bucket.items()}

    return {
        "expansions": {"counts": counts, "percent": percentages(counts, total), "total": total},
        "best_path": {
            "counts": path_counts,
            "percent": percentages(path_counts, path_length),
            "length": path_length,
        },
        "max_depth": None,
        "best_node_id": best.node_id if best is not None else None,
    }
