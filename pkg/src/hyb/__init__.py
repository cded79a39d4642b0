"""Interpreter and semantics workbench for a hybrid while-language."""

from .parser import ParseError, parse, try_parse
from .syntax import pretty, well_formed

__all__ = ["ParseError", "parse", "try_parse", "pretty", "well_formed"]
__version__ = "0.1.0"
