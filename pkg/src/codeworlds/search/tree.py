"""Search tree structures and the arm scoring rule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from codeworlds.core.types import EvaluationReport, UnitTestResult
from codeworlds.sandbox.errors import ExecError
from codeworlds.search.config import SearchConfig


def uct_score(value: float, parent_visits: int, same_type_children: int, config: SearchConfig) -> float:
    """Arm score: value plus an exploration bonus damped by how many same-type
    children the parent has already expanded (keeps trees from growing only
    sideways)."""
    if parent_visits < 1:
        raise ValueError("parent_visits must be >= 1")
    bonus = config.exploration_c * math.sqrt(
        math.log(parent_visits) / (same_type_children + config.exploration_epsilon)
    )
    return value + bonus


def buggy_temp_value(failed_fixes: int, max_fix_chain: int) -> float:
    """Placeholder value of a broken program: starts just below a perfect score
    and decays linearly to zero as repair attempts fail."""
    if not 0 <= failed_fixes <= max_fix_chain:
        raise ValueError(f"failed_fixes must lie in [0, {max_fix_chain}]")
    return 0.99 * (1.0 - failed_fixes / max_fix_chain)


@dataclass
class ActionArm:
    """One untried or tried action choice hanging off a node."""

    action: str
    child_id: Optional[int] = None

    @property
    def expanded(self) -> bool:
        return self.child_id is not None


@dataclass
class SearchNode:
    node_id: int
    parent_id: Optional[int]
    incoming_action: str
    state_lines: tuple[str, ...]
    rollout_lines: tuple[str, ...]
    source_text: str
    is_buggy: bool = False
    failed_fixes: int = 0
    temp_value: Optional[float] = None
    eval_value: Optional[float] = None  # this node's own program score; never rewritten
    visits: int = 1
    value_sum: float = 0.0
    value_count: int = 0
    error: Optional[ExecError] = None
    report: Optional[EvaluationReport] = None
    io_results: Optional[tuple[UnitTestResult, ...]] = None
    arms: list[ActionArm] = field(default_factory=list)

    @property
    def mean_value(self) -> Optional[float]:
        return self.value_sum / self.value_count if self.value_count else None

    @property
    def selection_value(self) -> float:
        """Value used when this node is a child option during selection."""
        if self.value_count:
            return self.value_sum / self.value_count
        if self.temp_value is not None:
            return self.temp_value
        return 0.0

    @property
    def depth_source(self) -> str:
        return "\n".join(self.state_lines + self.rollout_lines)


class Tree:
    """Node storage plus the bookkeeping queries selection needs."""

    def __init__(self, config: SearchConfig):
        self.config = config
        self.nodes: list[SearchNode] = []
        root = SearchNode(
            node_id=0,
            parent_id=None,
            incoming_action="",
            state_lines=(),
            rollout_lines=(),
            source_text="",
        )
        # The root always offers generate: it is the only possible first move.
        root.arms.append(ActionArm("generate"))
        self.nodes.append(root)

    @property
    def root(self) -> SearchNode:
        return self.nodes[0]

    def node(self, node_id: int) -> SearchNode:
        return self.nodes[node_id]

    def add_node(self, node: SearchNode) -> SearchNode:
        assert node.node_id == len(self.nodes)
        self.nodes.append(node)
        return node

    def next_id(self) -> int:
        return len(self.nodes)

    def expanded_same_type(self, node: SearchNode, action: str) -> int:
        return sum(1 for arm in node.arms if arm.action == action and arm.expanded)

    def local_values(self, node: SearchNode, action: str) -> list[float]:
        """Real (non-placeholder) values of same-type expanded children."""
        values = []
        for arm in node.arms:
            if arm.action == action and arm.expanded:
                child = self.node(arm.child_id)
                if child.value_count:
                    values.append(child.value_sum / child.value_count)
        return values

    def is_saturated(self, node: SearchNode) -> bool:
        """True when nothing below this node can ever be expanded again."""
        if not node.arms:
            return True
        for arm in node.arms:
            if not arm.expanded:
                return False
            if not self.is_saturated(self.node(arm.child_id)):
                return False
        return True

    def arms_for_new_node(self, is_buggy: bool, failed_fixes: int, *, is_root: bool = False) -> list[ActionArm]:
        enabled = self.config.enabled_actions
        if is_buggy:
            if "fix" in enabled and failed_fixes < self.config.max_fix_chain:
                return [ActionArm("fix")]
            return []
        arms = []
        if "generate" in enabled or is_root:
            arms.append(ActionArm("generate"))
        if "improve" in enabled and not is_root:
            arms.append(ActionArm("improve"))
        return arms

    def depth(self, node: SearchNode) -> int:
        depth = 0
        while node.parent_id is not None:
            node = self.node(node.parent_id)
            depth += 1
        return depth

    def max_depth(self) -> int:
        return max((self.depth(n) for n in self.nodes), default=0)

    def best_node(self) -> Optional[SearchNode]:
        """The node holding the best-scoring evaluated program (earliest wins ties)."""
        best: Optional[SearchNode] = None
        for node in self.nodes:
            if node.eval_value is None:
                continue
            if best is None or node.eval_value > best.eval_value:
                best = node
        return best

    def path_to_root(self, node: SearchNode) -> list[SearchNode]:
        path = [node]
        while path[-1].parent_id is not None:
            path.append(self.node(path[-1].parent_id))
        return path
