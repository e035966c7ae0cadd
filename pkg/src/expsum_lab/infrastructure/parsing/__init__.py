"""Frequency expression parsing."""

from expsum_lab.infrastructure.parsing.frequency_parser import (
    format_tree,
    parse_frequency,
    parse_frequency_expr,
    parse_tree,
)

__all__ = ["format_tree", "parse_frequency", "parse_frequency_expr", "parse_tree"]
