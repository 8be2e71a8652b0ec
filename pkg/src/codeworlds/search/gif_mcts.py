"""Tree search over program prefixes with generate/improve/fix actions.

Each node holds a program split into a committed prefix (its state) and the
remainder of that program (its rollout); expanding a node asks the language
model for a new complete program via one of three actions, scores it against
the task, and backs the score up the tree. Broken programs receive decaying
placeholder values that steer the search toward repairing them without ever
polluting ancestor value averages.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Optional

from codeworlds.core.types import ProgramSource
from codeworlds.evaluate import NodeEvaluation, format_error
from codeworlds.llm.gateway import GatewayError, LlmGateway
from codeworlds.llm.parsing import CodeParseError, parse_code
from codeworlds.llm.prompts import render_prompt
from codeworlds.sandbox.errors import ExecError
from codeworlds.search.config import SearchConfig
from codeworlds.search.tree import ActionArm, SearchNode, Tree, buggy_temp_value, uct_score
from codeworlds.search.value_model import EstimatorInputs, ValueEstimator

logger = logging.getLogger(__name__)

PERFECT_VALUE = 1.0 - 1e-12


class SearchExhausted(RuntimeError):
    """Every arm in the tree is saturated; no expansion is possible."""


@dataclass
class Expansion:
    step: int
    node_id: int
    parent_id: int
    action: str
    value: float
    is_buggy: bool

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "node_id": self.node_id,
            "parent_id": self.parent_id,
            "action": self.action,
            "value": self.value,
            "is_buggy": self.is_buggy,
        }


@dataclass
class SearchTrace:
    """Everything needed to replay or audit one search run."""

    method: str
    seed: int
    config: dict
    expansions: list[Expansion] = field(default_factory=list)
    llm_calls_used: int = 0
    best_node_id: Optional[int] = None
    best_value: Optional[float] = None
    best_program: str = ""
    aborted: Optional[str] = None
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "seed": self.seed,
            "config": self.config,
            "expansions": [e.to_json() for e in self.expansions],
            "llm_calls_used": self.llm_calls_used,
            "best_node_id": self.best_node_id,
            "best_value": self.best_value,
            "best_program": self.best_program,
            "aborted": self.aborted,
            "stats": self.stats,
        }

    def to_json_str(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def split_state_rollout(
    parent_state: tuple[str, ...], program_lines: list[str], lines_per_node: int
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Split a complete program into a committed prefix and the remainder.

    The prefix extends the parent's by `lines_per_node` non-empty lines; blank
    lines attach to the content line that follows them. Programs too short to
    extend the prefix become all-state with an empty rollout.
    """
    target = sum(1 for line in parent_state if line.strip()) + lines_per_node
    boundary = len(program_lines)
    seen = 0
    for i, line in enumerate(program_lines):
        if line.strip():
            seen += 1
            if seen == target:
                boundary = i + 1
                break
    return tuple(program_lines[:boundary]), tuple(program_lines[boundary:])


def select_leaf(
    tree: Tree, estimator: ValueEstimator
) -> tuple[list[SearchNode], SearchNode, ActionArm, EstimatorInputs]:
    """Descend by arm score until reaching an unexpanded arm.

    Returns the node path from the root to the arm's owner, the owner, the
    chosen arm, and the estimator inputs used to score it. Ties break toward
    the earliest arm; arms leading into saturated subtrees are skipped.
    """
    config = tree.config
    node = tree.root
    path = [node]
    while True:
        best_arm: Optional[ActionArm] = None
        best_score = float("-inf")
        best_inputs: Optional[EstimatorInputs] = None
        for arm in node.arms:
            if arm.expanded:
                child = tree.node(arm.child_id)
                if tree.is_saturated(child):
                    continue
                value = child.selection_value
                inputs = None
            else:
                value, inputs = estimator.estimate(arm.action, tree.local_values(node, arm.action))
            score = uct_score(value, node.visits, tree.expanded_same_type(node, arm.action), config)
            if score > best_score:
                best_score = score
                best_arm = arm
                best_inputs = inputs
        if best_arm is None:
            raise SearchExhausted("no selectable arm anywhere below the root")
        if not best_arm.expanded:
            return path, node, best_arm, best_inputs
        node = tree.node(best_arm.child_id)
        path.append(node)


def _backpropagate(path: list[SearchNode], child: SearchNode, value: Optional[float], gamma: float) -> None:
    """Bump visit counts along the path; fold a real value into running means.

    Placeholder (temporary) values pass value=None: the path is still counted
    as visited but no mean moves.
    """
    for node in path:
        node.visits += 1
    if value is None:
        return
    backed = value
    for node in [child] + list(reversed(path)):
        node.value_sum += backed
        node.value_count += 1
        backed *= gamma


def _propagate_fix_failures(tree: Tree, new_node: SearchNode, failed_fixes: int) -> None:
    """Share the failure count across the whole buggy chain above the new node."""
    config = tree.config
    node: Optional[SearchNode] = new_node
    while node is not None and node.is_buggy:
        node.failed_fixes = failed_fixes
        node.temp_value = buggy_temp_value(failed_fixes, config.max_fix_chain)
        node = tree.node(node.parent_id) if node.parent_id is not None else None


def _build_context(node: SearchNode, action: str, evaluator, description_key: str) -> dict:
    context = {description_key: evaluator.description}
    if action == "generate":
        context["CODE_SO_FAR"] = "\n".join(node.state_lines)
    elif action == "improve":
        context["CODE"] = node.source_text
        evaluation = NodeEvaluation(
            value=node.eval_value or 0.0,
            is_buggy=False,
            report=node.report,
            io_results=node.io_results,
        )
        context.update(evaluator.improve_context(evaluation))
    elif action == "fix":
        context["CODE"] = node.source_text
        if node.error is None:
            raise ValueError("fix action requires a stored error payload")
        context["ERROR"] = format_error(node.error)
    return context


def expand(
    tree: Tree,
    node: SearchNode,
    arm: ActionArm,
    gateway: LlmGateway,
    evaluator,
) -> SearchNode:
    """Run one action from `node`, score the resulting program, attach the child."""
    config = tree.config
    description_key = "ENV_DESCRIPTION" if evaluator.mode == "cwm" else "PROB_DESCRIPTION"
    context = _build_context(node, arm.action, evaluator, description_key)
    bundle = render_prompt(arm.action, evaluator.mode, context)
    completion = gateway.complete(bundle)

    parse_error: Optional[ExecError] = None
    try:
        code = parse_code(completion, bundle.assistant_prefix).replace("\r\n", "\n")
    except CodeParseError as exc:
        code = completion.replace("\r\n", "\n")
        parse_error = ExecError("syntax", f"no code block found in completion: {exc}")

    if arm.action == "generate" and node.state_lines and parse_error is None:
        full_text = "\n".join(node.state_lines) + "\n" + code
    else:
        full_text = code

    state_lines, rollout_lines = split_state_rollout(
        node.state_lines, full_text.split("\n"), config.lines_per_node
    )

    if parse_error is not None:
        evaluation = NodeEvaluation(value=0.0, is_buggy=True, error=parse_error)
    else:
        evaluation = evaluator.evaluate(full_text)

    child = SearchNode(
        node_id=tree.next_id(),
        parent_id=node.node_id,
        incoming_action=arm.action,
        state_lines=state_lines,
        rollout_lines=rollout_lines,
        source_text=full_text,
        is_buggy=evaluation.is_buggy,
        error=evaluation.error,
        report=evaluation.report,
        io_results=evaluation.io_results,
    )

    if evaluation.is_buggy:
        failed = node.failed_fixes + 1 if arm.action == "fix" else 0
        child.failed_fixes = failed
        child.temp_value = buggy_temp_value(failed, config.max_fix_chain)
    else:
        child.eval_value = evaluation.value

    child.arms = tree.arms_for_new_node(evaluation.is_buggy, child.failed_fixes)
    tree.add_node(child)
    arm.child_id = child.node_id
    # Generate and improve arms replenish; repairs stay sequential.
    if arm.action in ("generate", "improve"):
        node.arms.append(ActionArm(arm.action))
    if evaluation.is_buggy and arm.action == "fix":
        _propagate_fix_failures(tree, child, child.failed_fixes)
    return child


def run_search(task, config: SearchConfig, gateway: LlmGateway, evaluator) -> tuple[ProgramSource, SearchTrace]:
    """Search for the best program within the call budget.

    Stops early the moment a program scores a perfect value, or when the
    gateway fails, returning the best program found with a full trace.
    """
    tree = Tree(config)
    estimator = ValueEstimator(config)
    trace = SearchTrace(method="gif-mcts", seed=config.seed, config=config.to_json())

    while trace.llm_calls_used < config.budget:
        try:
            path, node, arm, inputs = select_leaf(tree, estimator)
        except SearchExhausted as exc:
            trace.aborted = str(exc)
            break
        try:
            child = expand(tree, node, arm, gateway, evaluator)
        except GatewayError as exc:
            trace.aborted = f"gateway failure: {exc}"
            logger.warning("search aborted after %d calls: %s", trace.llm_calls_used, exc)
            break
        trace.llm_calls_used += 1

        if child.is_buggy:
            _backpropagate(path, child, None, config.gamma)
        else:
            _backpropagate(path, child, child.eval_value, config.gamma)
            if inputs is not None:
                estimator.update(arm.action, inputs, child.eval_value)

        trace.expansions.append(
            Expansion(
                step=len(trace.expansions) + 1,
                node_id=child.node_id,
                parent_id=node.node_id,
                action=arm.action,
                value=child.temp_value if child.is_buggy else child.eval_value,
                is_buggy=child.is_buggy,
            )
        )
        if not child.is_buggy and child.eval_value >= PERFECT_VALUE:
            break

    best = tree.best_node()
    if best is None:
        program = ProgramSource(text="", valid=False)
    else:
        program = ProgramSource(
            text=best.source_text,
            state_lines=best.state_lines,
            rollout_lines=best.rollout_lines,
            node_id=best.node_id,
            parent_id=best.parent_id,
            action=best.incoming_action,
            valid=True,
        )
        trace.best_node_id = best.node_id
        trace.best_value = best.eval_value
        trace.best_program = best.source_text

    from codeworlds.search.stats import tree_statistics  # late import avoids a cycle

    trace.stats = tree_statistics(tree)
    return program, trace
