"""Extracting code from model completions."""

from __future__ import annotations


class CodeParseError(ValueError):
    """No usable code could be extracted from a completion."""


FENCE = "```"


def _strip_blank_edges(text: str) -> str:
    lines = text.split("\n")
    while lines and not lines[0].strip():
        lines.pop(0)
    while lines and not lines[-1].strip():
        lines.pop()
    return "\n".join(lines)


def parse_code(completion: str, assistant_prefix: str = "") -> str:
    """Pull the code out of a completion.

    If the assistant prefix already opened a fence, the completion runs until
    the closing fence (or end of text for truncated completions). Otherwise
    the first fenced block wins; with no fences at all the whole completion is
    treated as code.
    """
    prefix_opened = assistant_prefix.count(FENCE) % 2 == 1
    if prefix_opened:
        end = completion.find(FENCE)
        code = completion if end < 0 else completion[:end]
    else:
        start = completion.find(FENCE)
        if start < 0:
            code = completion
        else:
            # Skip the optional language tag on the opening fence line.
            line_end = completion.find("\n", start + len(FENCE))
            if line_end < 0:
                code = ""
            else:
                body_start = line_end + 1
                end = completion.find(FENCE, body_start)
                code = completion[body_start:] if end < 0 else completion[body_start:end]
    code = _strip_blank_edges(code)
    if not code.strip():
        raise CodeParseError("no code found in completion")
    return code
