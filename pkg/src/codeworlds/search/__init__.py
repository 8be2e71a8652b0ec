from codeworlds.search.config import ACTION_TYPES, SearchConfig, ablation_actions
from codeworlds.search.tree import ActionArm, SearchNode, Tree, buggy_temp_value, uct_score
from codeworlds.search.value_model import ValueEstimator
from codeworlds.search.gif_mcts import SearchTrace, run_search, select_leaf, split_state_rollout
from codeworlds.search.stats import render_stats_table, tree_statistics

__all__ = [
    "ACTION_TYPES",
    "SearchConfig",
    "ablation_actions",
    "ActionArm",
    "SearchNode",
    "Tree",
    "buggy_temp_value",
    "uct_score",
    "ValueEstimator",
    "SearchTrace",
    "run_search",
    "select_leaf",
    "split_state_rollout",
    "render_stats_table",
    "tree_statistics",
]
