"""Arm scoring rule and placeholder values for broken programs."""

from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from codeworlds.search.config import SearchConfig
from codeworlds.search.tree import buggy_temp_value, uct_score

CONFIG = SearchConfig()


class TestUctScore:
    def test_formula(self):
        # value + C * sqrt(ln(parent visits) / (same-type children + epsilon))
        expected = 0.4 + 0.1 * math.sqrt(math.log(7) / (2 + 1.0))
        assert uct_score(0.4, 7, 2, CONFIG) == pytest.approx(expected, abs=1e-15)

    def test_single_visit_parent_has_no_bonus(self):
        assert uct_score(0.4, 1, 0, CONFIG) == pytest.approx(0.4)

    def test_rejects_unvisited_parent(self):
        with pytest.raises(ValueError):
            uct_score(0.5, 0, 0, CONFIG)

    def test_bonus_shrinks_with_same_type_siblings(self):
        a = uct_score(0.5, 10, 0, CONFIG)
        b = uct_score(0.5, 10, 3, CONFIG)
        assert a > b > 0.5

    def test_custom_exploration_constants(self):
        config = SearchConfig(exploration_c=2.0, exploration_epsilon=0.5)
        expected = 0.1 + 2.0 * math.sqrt(math.log(4) / (1 + 0.5))
        assert uct_score(0.1, 4, 1, config) == pytest.approx(expected, abs=1e-15)

    @given(
        st.floats(0, 1),
        st.integers(min_value=1, max_value=10_000),
        st.integers(min_value=0, max_value=100),
    )
    def test_monotone_in_value_and_bounded_below(self, value, visits, siblings):
        score = uct_score(value, visits, siblings, CONFIG)
        assert score >= value  # bonus is never negative (ln(1) = 0 at minimum)
        assert uct_score(value + 0.5, visits, siblings, CONFIG) > score


class TestBuggyTempValue:
    def test_decay_schedule(self):
        values = [buggy_temp_value(k, 3) for k in range(4)]
        assert values == pytest.approx([0.99, 0.66, 0.33, 0.0], abs=1e-9)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            buggy_temp_value(-1, 3)
        with pytest.raises(ValueError):
            buggy_temp_value(4, 3)

    @given(st.integers(min_value=1, max_value=20))
    def test_endpoints_for_any_chain_length(self, chain):
        assert buggy_temp_value(0, chain) == pytest.approx(0.99)
        assert buggy_temp_value(chain, chain) == 0.0
