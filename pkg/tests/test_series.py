# tests/test_series.py
from __future__ import annotations

import random
from fractions import Fraction

import pytest

from dilution_planner.conc import ConcFactor
from dilution_planner.config import CORPUS_MAX_PRECISION, CORPUS_MAX_TARGETS
from dilution_planner.errors import CFRangeError
from dilution_planner.series import SeriesSpec, family_corpus, generate, random_series
from dilution_planner.utils import render_series


def strs(series):
    return render_series(series)


def test_linear():
    spec = SeriesSpec("linear", 3, 2, a=Fraction(1, 4), delta=Fraction(1, 4))
    assert strs(generate(spec)) == ["1/4", "2/4", "3/4"]


def test_harmonic_quantizes():
    spec = SeriesSpec("harmonic", 3, 4, a=Fraction(1, 2))
    assert [str(c) for c in generate(spec)] == ["1/2", "1/4", "3/16"]
    assert strs(generate(spec)) == ["8/16", "4/16", "3/16"]


def test_geometric_and_parabolic():
    geo = SeriesSpec("geometric", 3, 4, a=Fraction(1, 2), ratio=Fraction(1, 2))
    assert strs(generate(geo)) == ["4/8", "2/8", "1/8"]
    par = SeriesSpec("parabolic", 3, 4, a=Fraction(1, 16), b=Fraction(1, 16))
    assert strs(generate(par)) == ["1/16", "2/16", "5/16"]


def test_range_error_names_index():
    spec = SeriesSpec("linear", 4, 3, a=Fraction(1, 2), delta=Fraction(1, 4))
    with pytest.raises(CFRangeError, match="value 4"):
        generate(spec)


def test_explicit():
    spec = SeriesSpec("explicit", 0, 4, values=("5/16", "0.7", "1"))
    assert generate(spec) == [ConcFactor(5, 4), ConcFactor(11, 4), ConcFactor(1, 0)]


def test_bad_family():
    with pytest.raises(ValueError):
        SeriesSpec("cubic", 3, 4)


def test_generation_is_deterministic():
    a = family_corpus("geometric", n=8, precision=5, seed=7, count=5)
    b = family_corpus("geometric", n=8, precision=5, seed=7, count=5)
    assert a == b
    assert all(len(s) == 8 for s in a)


@pytest.mark.parametrize("family", ["linear", "harmonic", "geometric", "parabolic"])
def test_family_corpus_in_range(family):
    for series in family_corpus(family, n=6, precision=4, seed=3, count=20):
        assert all(c.prec <= 4 for c in series)


def test_random_series_shape():
    rng = random.Random(1)
    for _ in range(100):
        s = random_series(rng, max_targets=10, max_precision=7)
        assert 1 <= len(s) <= 10
        assert all(c.prec <= 7 for c in s)


def test_random_series_defaults_follow_corpus_limits():
    a = random_series(random.Random(5))
    b = random_series(random.Random(5), max_targets=CORPUS_MAX_TARGETS, max_precision=CORPUS_MAX_PRECISION)
    assert a == b
