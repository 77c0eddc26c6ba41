"""Parsing utilities for parameter grids given on the command line."""

import re

from app.errors import DomainError

NUMBER = r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?"

# lo:hi:step, e.g. -3:3:0.1
RANGE_PATTERN = re.compile(rf"^\s*({NUMBER})\s*:\s*({NUMBER})\s*:\s*({NUMBER})\s*$")

# Comma separated list, e.g. 8,16,32,64
LIST_PATTERN = re.compile(rf"^\s*{NUMBER}(?:\s*,\s*{NUMBER})*\s*$")

# Digits kept when snapping grid nodes, so 0.1 steps print as 0.3 and not 0.30000000000000004
GRID_DIGITS = 12


def parse_range(text: str) -> list[float]:
    """Expand ``lo:hi:step`` into the list of grid nodes, both ends included."""
    match = RANGE_PATTERN.match(text)
    if not match:
        raise DomainError(f"grid must look like lo:hi:step, got {text!r}")
    lo, hi, step = (float(g) for g in match.groups())
    if step <= 0:
        raise DomainError(f"grid step must be positive, got {step}")
    if hi < lo:
        raise DomainError(f"grid upper end {hi} is below lower end {lo}")

    count = int(round((hi - lo) / step)) + 1
    nodes = [round(lo + k * step, GRID_DIGITS) for k in range(count)]
    # Snap away negative zero
    return [node + 0.0 for node in nodes if node <= hi + step * 1e-9]


def parse_float_list(text: str) -> list[float]:
    """Parse ``0.25,0.5`` into floats."""
    if not LIST_PATTERN.match(text):
        raise DomainError(f"expected a comma separated list of numbers, got {text!r}")
    return [float(part) for part in text.split(",")]


def parse_int_list(text: str) -> list[int]:
    """Parse ``8,16,32`` into positive integers."""
    values = parse_float_list(text)
    if any(v != int(v) or v < 1 for v in values):
        raise DomainError(f"expected positive integers, got {text!r}")
    return [int(v) for v in values]


def parse_grid(text: str) -> list[float]:
    """Accept either ``lo:hi:step`` or an explicit comma separated list."""
    if ":" in text:
        return parse_range(text)
    return parse_float_list(text)
