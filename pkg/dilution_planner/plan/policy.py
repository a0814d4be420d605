# dilution_planner/plan/policy.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..config import (
    MAX_PRECISION,
    ORACLE_MAX_DROPLETS,
    ORACLE_MAX_PRECISION,
    ORACLE_MAX_STEPS,
    ORACLE_TIME_BUDGET_S,
)
from ..errors import PrecisionError

ORDERS = ("series", "descending", "best")
OBJECTIVES = ("samples", "steps")


@dataclass(frozen=True)
class PlannerConfig:
    # Target processing order
    order: str = "best"

    # Storage
    storage_capacity: Optional[int] = None  # None = unbounded, peak is still reported

    # Input limits
    max_precision: int = MAX_PRECISION

    def __post_init__(self) -> None:
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}, got {self.order!r}")
        if self.storage_capacity is not None and self.storage_capacity < 1:
            raise ValueError("storage_capacity must be positive")
        if not 0 <= self.max_precision <= MAX_PRECISION:
            raise PrecisionError(f"max_precision must be within 0..{MAX_PRECISION}")


@dataclass(frozen=True)
class SearchCaps:
    max_steps: int = ORACLE_MAX_STEPS
    max_droplets: int = ORACLE_MAX_DROPLETS
    max_precision: int = ORACLE_MAX_PRECISION
    time_budget_s: float = ORACLE_TIME_BUDGET_S

    # Admissible lower bounds on remaining samples / steps
    prune: bool = True

    def __post_init__(self) -> None:
        for name in ("max_steps", "max_droplets", "max_precision"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.time_budget_s <= 0:
            raise ValueError("time_budget_s must be positive")
        if self.max_precision > MAX_PRECISION:
            raise PrecisionError(f"max_precision must be <= {MAX_PRECISION}")
