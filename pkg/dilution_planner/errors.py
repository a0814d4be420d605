# dilution_planner/errors.py
from __future__ import annotations


class DilutionError(Exception):
    """Base class for everything this package raises on purpose."""


class CFRangeError(DilutionError, ValueError):
    pass


class PrecisionError(DilutionError, ValueError):
    pass


class CFParseError(DilutionError, ValueError):
    def __init__(self, message: str, *, position: int | None = None, text: str = ""):
        self.position = position
        self.text = text
        where = f" (item {position})" if position is not None else ""
        super().__init__(f"{message}{where}: {text!r}" if text else f"{message}{where}")


class CapacityError(DilutionError):
    pass


class PlannerError(DilutionError):
    pass


class ConservationError(DilutionError):
    pass


class PlanFormatError(DilutionError, ValueError):
    pass
