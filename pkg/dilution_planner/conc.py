# dilution_planner/conc.py
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Optional, Union

from .config import MAX_PRECISION
from .errors import CFParseError, CFRangeError, PrecisionError


Real = Union[Fraction, float, int, str]


@total_ordering
@dataclass(frozen=True)
class ConcFactor:
    """
    Exact concentration factor k/2^d of a unit droplet.

    Always stored canonical: k odd, or (0, 0) for buffer, or (1, 0) for
    pure sample. Dataclass equality and hashing therefore compare values.
    """
    num: int
    prec: int = 0

    def __post_init__(self) -> None:
        k, d = self.num, self.prec
        if isinstance(k, bool) or isinstance(d, bool) or not isinstance(k, int) or not isinstance(d, int):
            raise TypeError(f"ConcFactor needs integers, got ({k!r}, {d!r})")
        if d < 0:
            raise PrecisionError(f"negative precision {d}")
        if k < 0 or k > (1 << d):
            raise CFRangeError(f"{k}/2^{d} is outside [0, 1]")

        if k == 0:
            d = 0
        else:
            while d > 0 and not k & 1:
                k >>= 1
                d -= 1

        if d > MAX_PRECISION:
            raise PrecisionError(f"precision {d} exceeds the supported maximum {MAX_PRECISION}")

        object.__setattr__(self, "num", k)
        object.__setattr__(self, "prec", d)

    # ordering / conversions

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, ConcFactor):
            return NotImplemented
        return (self.num << other.prec) < (other.num << self.prec)

    def __float__(self) -> float:
        return self.num / (1 << self.prec)

    def __str__(self) -> str:
        return f"{self.num}/{1 << self.prec}"

    def __repr__(self) -> str:
        return f"ConcFactor({self})"

    @property
    def denominator(self) -> int:
        return 1 << self.prec

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, 1 << self.prec)

    def at(self, d: int) -> int:
        """Numerator of this CF written over 2^d (d >= prec)."""
        if d < self.prec:
            raise PrecisionError(f"{self} cannot be written over 2^{d}")
        return self.num << (d - self.prec)

    def over(self, d: int) -> str:
        """Unreduced text form over 2^d, e.g. '14/16'."""
        return f"{self.at(d)}/{1 << d}"

    @property
    def is_pure(self) -> bool:
        return self == ONE or self == ZERO


ZERO = ConcFactor(0, 0)
ONE = ConcFactor(1, 0)
HALF = ConcFactor(1, 1)


def mix(a: ConcFactor, b: ConcFactor) -> ConcFactor:
    """1:1 mix-split result (a + b) / 2, exact."""
    d = max(a.prec, b.prec)
    return ConcFactor(a.at(d) + b.at(d), d + 1)


def complement(t: ConcFactor, h: ConcFactor) -> Optional[ConcFactor]:
    """
    Partner c with mix(h, c) == t, i.e. 2t - h.

    Returns None when 2t - h falls outside [0, 1].
    """
    d = max(t.prec, h.prec)
    k = 2 * t.at(d) - h.at(d)
    if k < 0 or k > (1 << d):
        return None
    return ConcFactor(k, d)


def _check_precision(d: int) -> None:
    if d < 0 or d > MAX_PRECISION:
        raise PrecisionError(f"precision must be within 0..{MAX_PRECISION}, got {d}")


def quantize(x: Real, d: int) -> ConcFactor:
    """Nearest k/2^d to x; ties round up."""
    _check_precision(d)
    fx = Fraction(x)
    if fx < 0 or fx > 1:
        raise CFRangeError(f"value {x} is outside [0, 1]")
    k = math.floor(fx * (1 << d) + Fraction(1, 2))
    return ConcFactor(k, d)


def from_fraction(f: Fraction) -> ConcFactor:
    den = f.denominator
    if den & (den - 1):
        raise CFParseError("denominator is not a power of two", text=str(f))
    return ConcFactor(f.numerator, den.bit_length() - 1)


def parse_cf(text: str, *, precision: Optional[int] = None, position: Optional[int] = None) -> ConcFactor:
    """
    Parse 'k/m' (m a power of two) or a decimal.

    A decimal is quantized when precision is given; without it only
    decimals that are already dyadic (0.5, 0.3125, ...) are accepted.
    """
    s = (text or "").strip()
    if not s:
        raise CFParseError("empty concentration", position=position)

    try:
        if "/" in s:
            num_s, den_s = s.split("/", 1)
            k, m = int(num_s), int(den_s)
            if m <= 0 or m & (m - 1):
                raise CFParseError("denominator must be a power of two", position=position, text=s)
            return ConcFactor(k, m.bit_length() - 1)

        f = Fraction(s)
    except (CFParseError, PrecisionError):
        raise
    except (ValueError, ZeroDivisionError) as e:
        raise CFParseError(f"not a concentration ({e})", position=position, text=s) from e

    if f < 0 or f > 1:
        raise CFParseError("value is outside [0, 1]", position=position, text=s)

    if precision is not None:
        return quantize(f, precision)

    try:
        return from_fraction(f)
    except CFParseError:
        raise CFParseError("decimal is not dyadic; give a precision", position=position, text=s) from None
