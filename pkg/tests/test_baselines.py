"""Baseline synthesis strategies: the program bandit and zero-shot sampling."""

from __future__ import annotations

import numpy as np
import pytest

from support import BROKEN_SYNTAX, MEDIOCRE_LINEWORLD, fenced, make_mock_gateway, reasoned
from codeworlds.baselines import (
    BETA_PRIOR_SCALE,
    beta_init,
    run_worldcoder,
    run_zero_shot,
    thompson_select,
)
from codeworlds.search.config import SearchConfig


class TestBetaInit:
    def test_scaled_priors(self):
        assert beta_init(1.0) == (6.0, 1.0)
        assert beta_init(0.0) == (1.0, 6.0)
        assert beta_init(0.5) == (3.5, 3.5)

    def test_scale_constant(self):
        assert BETA_PRIOR_SCALE == 5.0

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            beta_init(1.2)
        with pytest.raises(ValueError):
            beta_init(-0.1)


class TestThompsonSelect:
    def test_strong_arm_dominates(self):
        rng = np.random.default_rng(0)
        wins = sum(thompson_select([(6.0, 1.0), (1.0, 6.0)], rng) == 0 for _ in range(2000))
        assert wins / 2000 > 0.9

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            thompson_select([], np.random.default_rng(0))

    def test_deterministic_under_seed(self):
        params = [(2.0, 2.0), (3.0, 1.0), (1.0, 3.0)]
        a = [thompson_select(params, np.random.default_rng(7)) for _ in range(5)]
        b = [thompson_select(params, np.random.default_rng(7)) for _ in range(5)]
        assert a == b


class TestWorldCoder:
    def test_perfect_first_sample_stops(self, lineworld_evaluator, lineworld_solution):
        gateway = make_mock_gateway([fenced(lineworld_solution)])
        program, trace = run_worldcoder(None, SearchConfig(budget=10), gateway, lineworld_evaluator)
        assert trace.method == "worldcoder"
        assert trace.llm_calls_used == 1
        assert program.valid and trace.best_value == pytest.approx(1.0)
        assert trace.expansions[0].action == "generate"
        assert trace.expansions[0].parent_id == 0

    def test_healthy_arm_gets_improved_buggy_arm_gets_fixed(self, lineworld_evaluator, lineworld_solution):
        # first sample is broken: the only arm is buggy, so the second call
        # must be a fix; the repair is perfect and the run stops
        gateway = make_mock_gateway([fenced(BROKEN_SYNTAX), reasoned(lineworld_solution)])
        program, trace = run_worldcoder(None, SearchConfig(budget=10), gateway, lineworld_evaluator)
        assert [e.action for e in trace.expansions] == ["generate", "fix"]
        assert trace.best_value == pytest.approx(1.0)

        gateway = make_mock_gateway([fenced(MEDIOCRE_LINEWORLD), reasoned(lineworld_solution)])
        program, trace = run_worldcoder(None, SearchConfig(budget=10), gateway, lineworld_evaluator)
        assert [e.action for e in trace.expansions] == ["generate", "improve"]
        assert trace.best_value == pytest.approx(1.0)

    def test_reward_only_on_strict_improvement(self, lineworld_evaluator):
        # two mediocre rounds: the refinement ties its parent, so the sampled
        # arm is penalized (beta grows), never rewarded
        gateway = make_mock_gateway([fenced(MEDIOCRE_LINEWORLD), reasoned(MEDIOCRE_LINEWORLD)])
        program, trace = run_worldcoder(None, SearchConfig(budget=2), gateway, lineworld_evaluator)
        assert trace.llm_calls_used == 2
        assert trace.best_value == pytest.approx(0.040358744394618826)

    def test_exhausted_gateway_aborts(self, lineworld_evaluator):
        gateway = make_mock_gateway([fenced(MEDIOCRE_LINEWORLD)])
        _, trace = run_worldcoder(None, SearchConfig(budget=5), gateway, lineworld_evaluator)
        assert trace.llm_calls_used == 1
        assert "gateway failure" in trace.aborted

    def test_stats_shape_matches_tree_search(self, lineworld_evaluator, lineworld_solution):
        gateway = make_mock_gateway([fenced(lineworld_solution)])
        _, trace = run_worldcoder(None, SearchConfig(budget=3), gateway, lineworld_evaluator)
        stats = trace.stats
        assert set(stats) == {"expansions", "best_path", "max_depth", "best_node_id"}
        assert stats["expansions"]["counts"]["generate"] == 1
        assert stats["best_path"]["length"] == 1
        assert stats["max_depth"] is None  # bandits have no depth notion
        assert stats["best_node_id"] == 1


class TestZeroShot:
    def test_samples_independently_until_perfect(self, lineworld_evaluator, lineworld_solution):
        records = [fenced(MEDIOCRE_LINEWORLD), fenced(lineworld_solution), fenced(MEDIOCRE_LINEWORLD)]
        gateway = make_mock_gateway(records)
        program, trace = run_zero_shot(None, SearchConfig(budget=5), gateway, lineworld_evaluator)
        assert trace.method == "zero-shot-cot"
        assert trace.llm_calls_used == 2  # stopped at the perfect draw
        assert all(e.action == "generate" and e.parent_id == 0 for e in trace.expansions)
        assert program.text == lineworld_solution.rstrip("\n")

    def test_keeps_best_of_budget(self, lineworld_evaluator):
        records = [fenced(BROKEN_SYNTAX), fenced(MEDIOCRE_LINEWORLD), fenced(BROKEN_SYNTAX)]
        gateway = make_mock_gateway(records)
        program, trace = run_zero_shot(None, SearchConfig(budget=3), gateway, lineworld_evaluator)
        assert trace.llm_calls_used == 3
        assert program.valid
        assert trace.best_node_id == 2
        assert trace.best_value == pytest.approx(0.040358744394618826)

    def test_io_mode_reads_fenced_blocks_from_reasoning(self, doubler_evaluator):
        # zero-shot replies reason first, then give a fenced solution
        completion = (
            "Let me think. We double the number.\n\n"
            "```python\nn = int(input())\nprint(2 * n)\n```\n\nDone."
        )
        gateway = make_mock_gateway([completion])
        program, trace = run_zero_shot(None, SearchConfig(budget=3), gateway, doubler_evaluator)
        assert trace.llm_calls_used == 1
        assert trace.best_value == pytest.approx(1.0)
        assert program.text == "n = int(input())\nprint(2 * n)"

    def test_all_buggy_run_is_invalid(self, lineworld_evaluator):
        gateway = make_mock_gateway([fenced(BROKEN_SYNTAX)] * 2)
        program, trace = run_zero_shot(None, SearchConfig(budget=2), gateway, lineworld_evaluator)
        assert not program.valid
        assert trace.best_value is None
        assert trace.expansions and all(e.is_buggy for e in trace.expansions)

    def test_steps_count_from_one(self, lineworld_evaluator):
        gateway = make_mock_gateway([fenced(MEDIOCRE_LINEWORLD)] * 3)
        _, trace = run_zero_shot(None, SearchConfig(budget=3), gateway, lineworld_evaluator)
        assert [e.step for e in trace.expansions] == [1, 2, 3]
