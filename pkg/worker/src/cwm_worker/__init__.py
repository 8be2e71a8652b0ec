"""Execution worker for candidate environment programs.

Runs as a subprocess owned by an orchestrator. The first stdin line carries a
JSON resource-limit budget; every following line is one JSON request
{id, op, args} and every stdout line is one JSON response {id, ok, result} or
{id, ok, error}. Candidate code executes under per-call CPU, wall-clock, and
process memory limits, with its stdout/stderr captured so the protocol stream
never carries stray bytes.
"""

__version__ = "0.1.0"
