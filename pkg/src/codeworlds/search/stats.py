"""Summary statistics over a finished search tree."""

from __future__ import annotations

from codeworlds.search.config import ACTION_TYPES
from codeworlds.search.tree import Tree


def tree_statistics(tree: Tree) -> dict:
    """Count expansions per action type, overall and along the best path."""
    counts = {action: 0 for action in ACTION_TYPES}
    for node in tree.nodes[1:]:
        counts[node.incoming_action] += 1
    total = sum(counts.values())

    best = tree.best_node()
    path_counts = {action: 0 for action in ACTION_TYPES}
    path_length = 0
    if best is not None:
        for node in tree.path_to_root(best):
            if node.incoming_action:
                path_counts[node.incoming_action] += 1
                path_length += 1

    def percentages(bucket: dict, denom: int) -> dict:
        if denom == 0:
            return {action: 0.0 for action in bucket}
        return {action: 100.0 * n / denom for action, n in bucket.items()}

    return {
        "expansions": {
            "counts": counts,
            "percent": percentages(counts, total),
            "total": total,
        },
        "best_path": {
            "counts": path_counts,
            "percent": percentages(path_counts, path_length),
            "length": path_length,
        },
        "max_depth": tree.max_depth(),
        "best_node_id": best.node_id if best is not None else None,
    }


def render_stats_table(stats: dict) -> str:
    """Fixed-width text table of expansion and best-path action shares."""
    rows = [("action", "expansions", "expansions %", "best path", "best path %")]
    counts = stats["expansions"]["counts"]
    pcts = stats["expansions"]["percent"]
    path_counts = stats["best_path"]["counts"]
    path_pcts = stats["best_path"]["percent"]
    for action in ACTION_TYPES:
        rows.append(
            (
                action,
                str(counts.get(action, 0)),
                f"{pcts.get(action, 0.0):.1f}",
                str(path_counts.get(action, 0)),
                f"{path_pcts.get(action, 0.0):.1f}",
            )
        )
    rows.append(
        (
            "total",
            str(stats["expansions"]["total"]),
            "",
            str(stats["best_path"]["length"]),
            "",
        )
    )
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * widths[j] for j in range(len(widths))))
    return "\n".join(lines)
