"""Canned programs, paths, and gateway builders shared across the suite.

Kept outside conftest.py so tests can import these by a module name that stays
unambiguous when this suite and the worker's suite run in one pytest session.
"""

from __future__ import annotations

from pathlib import Path

from codeworlds.llm.gateway import BackendConfig, LlmGateway, MockScript

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"

# A syntactically valid model that stores the position but predicts every
# transition as an instant terminal payout. It scores poorly on the corridor
# buffer, which keeps search exploring instead of stopping.
MEDIOCRE_LINEWORLD = """\
class Environment:
    def __init__(self):
        self.pos = 0

    def set_state(self, state):
        self.pos = int(state)

    def step(self, action):
        return self.pos, 1.0, True
"""

# Correct movement dynamics but silent about reward and termination: a strong
# but imperfect model, useful for exercising non-root expansion paths.
MOVE_ONLY_LINEWORLD = """\
class Environment:
    def __init__(self):
        self.pos = 0

    def set_state(self, state):
        self.pos = int(state)

    def step(self, action):
        if action == 1:
            self.pos = min(self.pos + 1, 9)
        else:
            self.pos = max(self.pos - 1, 0)
        return self.pos, 0.0, False
"""

BROKEN_SYNTAX = "class Environment(\n    def set_state(self, state)\n"

RAISING_STEP = """\
class Environment:
    def __init__(self):
        self.pos = 0

    def set_state(self, state):
        self.pos = int(state)

    def step(self, action):
        raise RuntimeError("deliberate failure")
"""


def make_mock_gateway(records) -> LlmGateway:
    """Gateway replaying an in-memory script instead of reading one from disk."""
    config = BackendConfig(kind="mock", script_path="<inline>")
    return LlmGateway(config, script=MockScript(records))


def fenced(code: str, trailer: str = "Closing remarks.") -> str:
    """Wrap program text the way a code-completion reply arrives: the prompt
    already opened the fence, so the reply is code, closing fence, prose."""
    return f"{code}```\n\n{trailer}"


def reasoned(code: str) -> str:
    """Wrap program text the way a repair/refinement reply arrives: prose
    sections first, then a self-contained fenced code block."""
    return (
        "## Error explanation\n\nThe previous program mishandled the dynamics.\n\n"
        "## Fix suggestion\n\nRewrite it faithfully.\n\n"
        f"## Correct code\n\n```python\n{code}\n```\n"
    )
