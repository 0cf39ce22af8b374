"""Qudit W-state and controlled-gate synthesis with exact verification."""

from . import synth  # noqa: F401  (registers macros)

__version__ = "0.1.0"
