"""lacecheck: proof checker for concurrent programs laced with weak-memory

ordering constraints and modal assertions."""

__version__ = "0.1.0"

from .parser import parse_program  # noqa: F401
