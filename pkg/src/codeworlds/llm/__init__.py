from codeworlds.llm.prompts import PromptBundle, PromptContextError, render_prompt, render_reasoning_prompt
from codeworlds.llm.parsing import CodeParseError, parse_code
from codeworlds.llm.gateway import BackendConfig, GatewayError, LlmGateway, MockScript, SamplingParams

__all__ = [
    "PromptBundle",
    "PromptContextError",
    "render_prompt",
    "render_reasoning_prompt",
    "CodeParseError",
    "parse_code",
    "BackendConfig",
    "GatewayError",
    "LlmGateway",
    "MockScript",
    "SamplingParams",
]
