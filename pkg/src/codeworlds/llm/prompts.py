"""Prompt templates for the three code actions, in world-model and stdin/stdout flavors.

Each template is a (system, user, assistant prefix) triple. The assistant
prefix pre-fills the start of the model's reply: code-completion prompts open
a ```python fence so the model continues the program, and repair prompts open
the "## Error explanation" section so the model reasons before rewriting.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

ACTIONS = ("generate", "improve", "fix")
MODES = ("cwm", "io")

_PLACEHOLDERS = (
    "PROB_DESCRIPTION",
    "ENV_DESCRIPTION",
    "CODE_SO_FAR",
    "CODE",
    "INPUT",
    "OUTPUT",
    "PREDICTION",
    "ERROR",
)
_PLACEHOLDER_RE = re.compile(r"\{(" + "|".join(_PLACEHOLDERS) + r")\}")


class PromptContextError(KeyError):
    """A template placeholder had no value in the rendering context."""


@dataclass(frozen=True)
class PromptBundle:
    """A fully rendered prompt ready for one completion call."""

    system: str
    user: str
    assistant_prefix: str
    action: str
    mode: str


_SYSTEM_COMPLETE = (
    "You are an experienced Python developer. You will be provided with an incomplete code snippet "
    "from a Python program. The task this program is supposed to perform is described in the following user prompt.\n"
    "Your task is to complete the code snippet by writing the missing code so that the program performs "
    "the task as expected without any errors. You will be rewarded based on the number of test cases your code passes."
)

_SYSTEM_REWRITE_SNIPPET = (
    "You are an experienced Python developer. You will be provided with an incorrect code snippet "
    "from a Python program. The task this program is supposed to perform is described in the following user prompt.\n"
    "Your task is to rewrite the program so that it performs the task as expected without any errors. "
    "You will be rewarded based on the number of test cases your code passes."
)

_SYSTEM_REWRITE_PROGRAM = (
    "You are an experienced Python developer. You will be provided with an incorrect Python program. "
    "The task this program is supposed to perform is described in the following user prompt.\n"
    "Your task is to rewrite the program so that it performs the task as expected without any errors. "
    "You will be rewarded based on the number of test cases your code passes."
)

_STDIO_NOTE = (
    "Please read the inputs from the standard input (stdin) and print the outputs to the standard output (stdout)."
)

_CLASS_DEFINITION = """## Class Definition

The class should be called "Environment". It should have at least:

- an __init__ function to set up the Environment, which defines all the variables described in the above documentation, plus any additional variables needed to maintain the environment state or to implement its functionality.

- a set_state function to set a custom value for the environment and its internal representation (you can assume that when "set_state" is used, the task is not done and internal variables should be set as a consequence). set_state takes a single argument as input: a state observation from the observation space defined above.

- a step function to predict a step in the environment. The input parameters for the step function are:

    - An action, which must be contained in the action space described above.

    The outputs required by the step function are:

    - An observation, which must be contained in the observation space described above.

    - The reward for taking the action, as described in the reward definition above.

    - A boolean variable indicating if the episode is done."""

_IMPORTANT_NOTES = """## Important Notes

Only produce the environment class, containing the __init__, set_state and step functions and any additional functions you may need to complete this task. Do not write an example of how to use the class or anything else.
Be careful about edge cases.
Make sure to write all the required functions and that they have the exact names as specified in the task description. Missing or incorrectly named functions will not pass the tests and will result in a score of 0.
It is of VITAL importance that you do not leave undefined any function, but implement each of them completely."""

_CODE_PREFILL = "```python\n\n{CODE_SO_FAR}\n"
_EXPLANATION_PREFILL = "## Error explanation\n"

_IO_GENERATE_USER = """{PROB_DESCRIPTION}

%(stdio)s
Output your code solution with the following format:
```python
[your code]
```""" % {"stdio": _STDIO_NOTE}

_IO_IMPROVE_USER = """{PROB_DESCRIPTION}

%(stdio)s

First, write an explanation of the difference between the ground-truth output and the program's output in the example provided.
Secondly, point out the part of the code responsible for the incorrect prediction and why its logic is erroneous.
Third, suggest a concrete, actionable fix for it.
Finally fix the program in its entirety following the suggestion. The expected output is in the format:

## Error explanation

[your explanation of the error]

## Error location and wrong logic

[where the error comes from and why]

## Fix suggestion

[how to fix the error]

## Correct code

```python

[your code]

```

## Incorrect code

You are provided with the following code snippet to fix.

```python

{CODE}

```

The code additionally makes a wrong prediction about this input.

## Input

{INPUT}

## Ground-truth output

{OUTPUT}

## Code incorrect outputs

{PREDICTION}""" % {"stdio": _STDIO_NOTE}

_IO_FIX_USER = """{PROB_DESCRIPTION}

%(stdio)s

First, write an explanation of the error and point out the part of the code responsible for the error and why its logic is erroneous.
Second, suggest how you would fix the error, reasoning about the problem.
Finally fix the program in its entirety following the suggestion. The expected output is in the format:

## Error explanation

[your explanation of the error]

## Fix suggestion

[how to fix the error]

## Correct code

```python

[your code]

```

## Incorrect code

You are provided with the following code snippet to fix.

```python

{CODE}

```

{ERROR}""" % {"stdio": _STDIO_NOTE}

_CWM_GENERATE_USER = """{ENV_DESCRIPTION}

%(classdef)s

%(notes)s""" % {"classdef": _CLASS_DEFINITION, "notes": _IMPORTANT_NOTES}

_CWM_IMPROVE_USER = """{ENV_DESCRIPTION}

%(classdef)s

%(notes)s

First, write an explanation of the difference between the ground-truth transition and the step function's outputs in the example provided.
Second, point out the part of the code responsible for the incorrect prediction and why its logic is erroneous.
Third, suggest a concrete, actionable fix for it.
Finally, fix the program in its entirety following the suggestion. The expected output is in the format:

## Error explanation

[your explanation of the error]

## Error location and wrong logic

[where the error comes from and why]

## Fix suggestion

[how to fix the error]

## Correct code

```python
[your code]
```

## Incorrect code

You are provided with the following code snippet to fix.

```python
{CODE}
```

The code additionally makes a wrong prediction about this input.

## Input

{INPUT}

## Ground-truth output

{OUTPUT}

## Code incorrect outputs

{PREDICTION}""" % {"classdef": _CLASS_DEFINITION, "notes": _IMPORTANT_NOTES}

_CWM_FIX_USER = """{ENV_DESCRIPTION}

%(classdef)s

%(notes)s

First, write an explanation of the error and point out the part of the code responsible for the error and why its logic is erroneous.
Second, suggest how you would fix the error, reasoning about the problem.
Finally fix the program in its entirety following the suggestion. The expected output is in the format:

## Error explanation

[your explanation of the error]

## Fix suggestion

[how to fix the error]

## Correct code

```python

[your code]

```

## Incorrect code

You are provided with the following code snippet to fix.

```python

{CODE}

```

{ERROR}""" % {"classdef": _CLASS_DEFINITION, "notes": _IMPORTANT_NOTES}

_TEMPLATES: dict[tuple[str, str], tuple[str, str, str]] = {
    ("generate", "io"): (_SYSTEM_COMPLETE, _IO_GENERATE_USER, _CODE_PREFILL),
    ("improve", "io"): (_SYSTEM_REWRITE_SNIPPET, _IO_IMPROVE_USER, _EXPLANATION_PREFILL),
    ("fix", "io"): (_SYSTEM_REWRITE_PROGRAM, _IO_FIX_USER, _EXPLANATION_PREFILL),
    ("generate", "cwm"): (_SYSTEM_COMPLETE, _CWM_GENERATE_USER, _CODE_PREFILL),
    ("improve", "cwm"): (_SYSTEM_REWRITE_SNIPPET, _CWM_IMPROVE_USER, _EXPLANATION_PREFILL),
    ("fix", "cwm"): (_SYSTEM_REWRITE_PROGRAM, _CWM_FIX_USER, _EXPLANATION_PREFILL),
}


def _substitute(template: str, context: dict[str, str]) -> str:
    needed = set(_PLACEHOLDER_RE.findall(template))
    missing = sorted(name for name in needed if name not in context)
    if missing:
        raise PromptContextError(f"missing {', '.join(missing)}")
    rendered = _PLACEHOLDER_RE.sub(lambda m: str(context[m.group(1)]), template)
    return rendered


def render_prompt(action: str, mode: str, context: dict[str, str]) -> PromptBundle:
    """Render one of the six (action x mode) templates with the given context."""
    if action not in ACTIONS:
        raise ValueError(f"unknown action {action!r}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    system, user_tpl, prefix_tpl = _TEMPLATES[(action, mode)]
    user = _substitute(user_tpl, context)
    prefix = _substitute(prefix_tpl, context)
    return PromptBundle(system=system, user=user, assistant_prefix=prefix, action=action, mode=mode)


def render_reasoning_prompt(problem_statement: str) -> PromptBundle:
    """Single-shot prompt: the problem statement followed by a step-by-step nudge."""
    user = (
        f"{problem_statement}\n\n{_STDIO_NOTE}\n"
        "Output your code solution with the following format:\n```python\n[your code]\n```\n\n"
        "Let's think step by step."
    )
    return PromptBundle(system="", user=user, assistant_prefix="", action="generate", mode="io")
