"""Conjunctive-query answering over EL-family knowledge bases.

Thin re-export of the compiled module: all operations take and return
plain text / dicts, mirroring the command-line interface.
"""

from _elq import (  # noqa: F401
    DialectError,
    KbParseError,
    ResourceLimitError,
    ShapeError,
    answer,
    check,
    classify,
    cli,
    materialize,
    oracle,
)

__all__ = [
    "answer",
    "check",
    "classify",
    "cli",
    "materialize",
    "oracle",
    "KbParseError",
    "ShapeError",
    "DialectError",
    "ResourceLimitError",
]
