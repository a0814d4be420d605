# tests/test_baseline.py
from __future__ import annotations

import random

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from dilution_planner.conc import ONE, ZERO, ConcFactor
from dilution_planner.execute import assert_conserved, execute
from dilution_planner.models import BUFFER, SAMPLE
from dilution_planner.plan.baseline import bit_schedule, naive_multi, two_way_mix_single
from dilution_planner.series import random_series
from dilution_planner.storage.plan_files import load_series_fixtures
from dilution_planner.utils import popcount


def test_schedule_for_five_sixteenths():
    sched = bit_schedule(ConcFactor(5, 4))
    assert sched.partners == (SAMPLE, BUFFER, BUFFER, SAMPLE, BUFFER)
    assert [str(c) for c in sched.intermediates()] == ["1/2", "1/4", "5/8", "5/16"]


def test_two_way_mix_five_sixteenths():
    trace = execute(two_way_mix_single(ConcFactor(5, 4)))
    assert trace.ok
    assert trace.stats.summary() == "S=2 B=3 W=4 steps=4 peak=1"


def test_pure_targets_are_direct():
    for t, src in ((ONE, SAMPLE), (ZERO, BUFFER)):
        plan = two_way_mix_single(t)
        assert plan.steps == ()
        assert plan.direct_dispenses == ((0, src),)
        assert execute(plan).ok


@pytest.mark.parametrize("d", range(1, 9))
def test_closed_form(d):
    for k in range(1, 1 << d, 2):
        t = ConcFactor(k, d)
        trace = execute(two_way_mix_single(t))
        assert trace.ok
        s = trace.stats
        assert s.n_steps == d
        assert s.n_sample == popcount(k)
        assert s.n_buffer == d + 1 - popcount(k)
        assert s.n_waste == d
        assert_conserved(trace)


def test_naive_ts1():
    ts1 = load_series_fixtures()["ts1"]
    trace = execute(naive_multi(ts1))
    assert trace.ok
    assert trace.stats.n_sample == 17
    assert trace.stats.n_steps == 2 * (4 + 4 + 3)
    assert_conserved(trace)


@st.composite
def series(draw):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_series(random.Random(seed), max_targets=10, max_precision=7)


@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(series())
def test_random_series_baselines_validate(targets):
    trace = execute(naive_multi(targets))
    assert trace.ok, trace.violations
    assert_conserved(trace)
    for t in set(targets):
        single = execute(two_way_mix_single(t))
        assert single.ok, single.violations
        assert_conserved(single)
