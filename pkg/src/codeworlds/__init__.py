"""Synthesis of executable world models from trajectory data, plus planners that use them."""

__version__ = "0.1.0"
