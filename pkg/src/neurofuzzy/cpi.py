"""Basket arithmetic: group price index and the weighted national index."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DataError

WEIGHT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class BasketGroup:
    name: str
    group_cpi: float
    weight: float

    def __post_init__(self):
        if not (math.isfinite(self.group_cpi) and self.group_cpi > 0):
            raise DataError(f"group {self.name!r}: CPI must be positive, got {self.group_cpi}")
        if not 0.0 <= self.weight <= 1.0:
            raise DataError(f"group {self.name!r}: weight must lie in [0, 1], got {self.weight}")


def group_cpi(current_cost: float, base_cost: float) -> float:
    """Cost of the basket now relative to the base period, times 100."""
    if not (current_cost > 0 and base_cost > 0):
        raise DataError(f"basket costs must be positive, got {current_cost} and {base_cost}")
    return current_cost / base_cost * 100.0


def national_cpi(groups: Sequence[BasketGroup]) -> float:
    """Weighted sum of group indices; weights must add up to one."""
    if not groups:
        raise DataError("national CPI needs at least one group")
    total = math.fsum(g.weight for g in groups)
    if abs(total - 1.0) > WEIGHT_TOLERANCE:
        raise DataError(f"basket weights sum to {total!r}, expected 1")
    return math.fsum(g.group_cpi * g.weight for g in groups)
