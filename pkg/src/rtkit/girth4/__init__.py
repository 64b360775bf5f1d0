"""Approximate directed girth: estimate g' with g <= g' <= 4g."""

from .config import GirthConfig
from .phases import CapExceeded, GirthInvariantError, GirthRun
from .pipeline import GirthEstimate, RetryLimitExceeded, approx_girth_4, cycle_weight

__all__ = [
    "CapExceeded",
    "GirthConfig",
    "GirthEstimate",
    "GirthInvariantError",
    "GirthRun",
    "RetryLimitExceeded",
    "approx_girth_4",
    "cycle_weight",
]
