"""Numeric tolerances shared by every module.

All dimension counts (zero angles, intersections, rank) read their thresholds
from the single :data:`POLICY` record so that a run is reproducible from one
place.  Use :func:`numeric_policy` to override temporarily.
"""
from __future__ import annotations

import contextlib
import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class NumericPolicy:
    zero_angle: float = 1e-8
    rank_cut: float = 1e-10
    orthonormal: float = 1e-10
    cos_guard: float = 1e-12
    min_advance: float = 1e-9
    on_wall: float = 1e-9
    tangential: float = 1e-10


POLICY = NumericPolicy()


def get_policy() -> NumericPolicy:
    return POLICY


@contextlib.contextmanager
def numeric_policy(**overrides):
    """Temporarily replace fields of the global policy.

    >>> with numeric_policy(zero_angle=1e-6):
    ...     get_policy().zero_angle
    1e-06
    """
    global POLICY
    saved = POLICY
    POLICY = dataclasses.replace(POLICY, **overrides)
    try:
        yield POLICY
    finally:
        POLICY = saved
