"""HTTP service exposing the synthesis, evaluation, planning and reporting
commands, plus the request/response schemas they speak."""

from codeworlds.service.app import create_app

__all__ = ["create_app"]
