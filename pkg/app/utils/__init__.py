"""Utilities package."""

from app.utils.grids import parse_float_list, parse_grid, parse_int_list, parse_range
from app.utils.logging import get_logger, setup_logging

__all__ = [
    "get_logger",
    "setup_logging",
    "parse_grid",
    "parse_range",
    "parse_float_list",
    "parse_int_list",
]
