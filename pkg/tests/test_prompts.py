"""Prompt rendering for the three code actions in both task flavors."""

from __future__ import annotations

import pytest

from codeworlds.llm.prompts import (
    ACTIONS,
    MODES,
    PromptBundle,
    PromptContextError,
    render_prompt,
    render_reasoning_prompt,
)


class TestRenderPrompt:
    def test_generate_cwm_prefills_code_fence_with_prefix(self):
        bundle = render_prompt(
            "generate", "cwm", {"ENV_DESCRIPTION": "A corridor.", "CODE_SO_FAR": "class Environment:"}
        )
        assert bundle.action == "generate" and bundle.mode == "cwm"
        assert "A corridor." in bundle.user
        assert '"Environment"' in bundle.user
        assert bundle.assistant_prefix.startswith("```python\n")
        assert "class Environment:" in bundle.assistant_prefix
        # the fence stays open so the completion continues the program
        assert bundle.assistant_prefix.count("```") == 1

    def test_generate_io_requests_fenced_solution(self):
        bundle = render_prompt("generate", "io", {"PROB_DESCRIPTION": "Print hello.", "CODE_SO_FAR": ""})
        assert "Print hello." in bundle.user
        assert "standard input" in bundle.user
        assert bundle.assistant_prefix.startswith("```python\n")

    def test_improve_carries_mismatch_example(self):
        context = {
            "ENV_DESCRIPTION": "desc",
            "CODE": "class Environment: pass",
            "INPUT": "State: 3\nAction: 1",
            "OUTPUT": "Next state: 4",
            "PREDICTION": "Next state: 9",
        }
        bundle = render_prompt("improve", "cwm", context)
        assert "class Environment: pass" in bundle.user
        assert "State: 3" in bundle.user
        assert "Next state: 4" in bundle.user and "Next state: 9" in bundle.user
        # repair-style prompts open with written reasoning, not code
        assert bundle.assistant_prefix == "## Error explanation\n"

    def test_fix_carries_error_payload(self):
        context = {"PROB_DESCRIPTION": "desc", "CODE": "x = ", "ERROR": "syntax: unexpected EOF"}
        bundle = render_prompt("fix", "io", context)
        assert "x = " in bundle.user
        assert "syntax: unexpected EOF" in bundle.user
        assert bundle.assistant_prefix == "## Error explanation\n"

    def test_every_action_mode_pair_renders(self):
        context = {
            "ENV_DESCRIPTION": "e", "PROB_DESCRIPTION": "p", "CODE_SO_FAR": "",
            "CODE": "c", "INPUT": "i", "OUTPUT": "o", "PREDICTION": "pr", "ERROR": "err",
        }
        for action in ACTIONS:
            for mode in MODES:
                bundle = render_prompt(action, mode, context)
                assert isinstance(bundle, PromptBundle)
                assert bundle.system
                assert "{" not in bundle.user  # no leftover placeholders

    def test_missing_context_raises_with_names(self):
        with pytest.raises(PromptContextError, match="CODE_SO_FAR"):
            render_prompt("generate", "cwm", {"ENV_DESCRIPTION": "d"})
        with pytest.raises(PromptContextError, match="ERROR"):
            render_prompt("fix", "cwm", {"ENV_DESCRIPTION": "d", "CODE": "c"})

    def test_unknown_action_or_mode_rejected(self):
        with pytest.raises(ValueError):
            render_prompt("mutate", "cwm", {})
        with pytest.raises(ValueError):
            render_prompt("generate", "video", {})


class TestReasoningPrompt:
    def test_statement_and_nudge(self):
        bundle = render_reasoning_prompt("Read n, print 2n.")
        assert bundle.user.startswith("Read n, print 2n.")
        assert "Let's think step by step." in bundle.user
        assert bundle.assistant_prefix == ""
        assert bundle.action == "generate" and bundle.mode == "io"
