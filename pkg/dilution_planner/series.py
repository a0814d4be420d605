# dilution_planner/series.py
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .config import CORPUS_MAX_PRECISION, CORPUS_MAX_TARGETS, MAX_PRECISION
from .conc import ConcFactor, parse_cf, quantize
from .errors import CFRangeError, PrecisionError

FAMILIES = ("linear", "harmonic", "geometric", "parabolic", "explicit")


@dataclass(frozen=True)
class SeriesSpec:
    """
    Parameters of a target gradient.

    linear:    c_i = a + (i-1) * delta
    harmonic:  c_i = a / i
    geometric: c_i = a * ratio^(i-1)   (log-spaced gradients)
    parabolic: c_i = a + b * (i-1)^2
    explicit:  c_i = values[i-1]
    """
    family: str
    n: int
    precision: int
    a: Fraction = Fraction(0)
    delta: Fraction = Fraction(0)
    ratio: Fraction = Fraction(1)
    b: Fraction = Fraction(0)
    values: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.family == "explicit":
            object.__setattr__(self, "n", len(self.values))
        if self.n < 1:
            raise ValueError("a series needs at least one target")
        if not 0 <= self.precision <= MAX_PRECISION:
            raise PrecisionError(f"precision must be within 0..{MAX_PRECISION}")
        for name in ("a", "delta", "ratio", "b"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))


def raw_values(spec: SeriesSpec) -> list[Fraction]:
    out: list[Fraction] = []
    for i in range(1, spec.n + 1):
        if spec.family == "linear":
            c = spec.a + (i - 1) * spec.delta
        elif spec.family == "harmonic":
            c = spec.a / i
        elif spec.family == "geometric":
            c = spec.a * spec.ratio ** (i - 1)
        elif spec.family == "parabolic":
            c = spec.a + spec.b * (i - 1) ** 2
        else:
            c = parse_cf(spec.values[i - 1], precision=spec.precision, position=i).value
        out.append(c)
    return out


def generate(spec: SeriesSpec) -> list[ConcFactor]:
    """Quantized target series; out-of-range values are an error, never clamped."""
    series: list[ConcFactor] = []
    for i, c in enumerate(raw_values(spec), start=1):
        if c < 0 or c > 1:
            raise CFRangeError(f"{spec.family} value {i} is {c}, outside [0, 1]")
        series.append(quantize(c, spec.precision))
    return series


def random_series(
    rng: random.Random,
    *,
    max_targets: int = CORPUS_MAX_TARGETS,
    max_precision: int = CORPUS_MAX_PRECISION,
    min_targets: int = 1,
) -> list[ConcFactor]:
    """Uniform k/2^d targets with a random shared d; duplicates allowed."""
    d = rng.randint(1, max_precision)
    n = rng.randint(min_targets, max_targets)
    return [ConcFactor(rng.randint(0, 1 << d), d) for _ in range(n)]


def family_spec(family: str, n: int, precision: int, rng: random.Random) -> SeriesSpec:
    """Draw in-range parameters for one member of a family corpus."""
    grid = 1 << precision

    def frac(lo: int, hi: int) -> Fraction:
        return Fraction(rng.randint(lo, hi), grid)

    if family == "linear":
        a = frac(1, grid // 2)
        top = max(0, (grid - a * grid) // max(1, n - 1))
        delta = Fraction(rng.randint(0, int(top)), grid)
        return SeriesSpec("linear", n, precision, a=a, delta=delta)
    if family == "harmonic":
        return SeriesSpec("harmonic", n, precision, a=frac(1, grid))
    if family == "geometric":
        ratio = Fraction(rng.randint(1, 9), 10)
        return SeriesSpec("geometric", n, precision, a=frac(grid // 2, grid), ratio=ratio)
    if family == "parabolic":
        a = frac(0, grid // 2)
        span = max(1, (n - 1) ** 2)
        b = Fraction(rng.randint(0, int((1 - a) * grid)), grid * span)
        return SeriesSpec("parabolic", n, precision, a=a, b=b)
    raise ValueError(f"no random corpus for family {family!r}")


def family_corpus(family: str, *, n: int, precision: int, seed: int, count: int = 10) -> list[list[ConcFactor]]:
    rng = random.Random(seed)
    return [generate(family_spec(family, n, precision, rng)) for _ in range(count)]
