# tests/test_execute.py
from __future__ import annotations

from fractions import Fraction

import pytest

from dilution_planner.conc import ConcFactor
from dilution_planner.errors import ConservationError
from dilution_planner.execute import (
    CF_MISMATCH,
    DOUBLE_CONSUMPTION,
    DOUBLE_SATISFIED,
    UNAVAILABLE,
    UNMET_TARGET,
    assert_conserved,
    check_conservation,
    execute,
)
from dilution_planner.models import BUFFER, SAMPLE, STORE, WASTE, Disposition, Plan, PlanStep, Source
from dilution_planner.storage.plan_files import load_witness

HALF = ConcFactor(1, 1)
QUARTER = ConcFactor(1, 2)


def kinds(trace):
    return [v.kind for v in trace.violations]


def test_witness_replays_to_published_counts():
    trace = execute(load_witness())
    assert trace.ok, trace.violations
    s = trace.stats
    assert (s.n_sample, s.n_buffer, s.n_waste, s.n_steps) == (5, 4, 2, 8)
    assert sorted(str(c) for c in trace.wasted) == ["1/8", "1/8"]


def test_witness_conserves():
    verdict = assert_conserved(execute(load_witness()))
    assert verdict.droplets_in == 9 == verdict.droplets_out
    assert verdict.sample_mass_in == Fraction(80, 16) == verdict.sample_mass_out


def test_single_mix_both_targets():
    plan = Plan(
        targets=(HALF, HALF),
        steps=(PlanStep(1, SAMPLE, BUFFER, HALF, Disposition.target(0), Disposition.target(1)),),
    )
    trace = execute(plan)
    assert trace.ok
    assert trace.stats.summary() == "S=1 B=1 W=0 steps=1 peak=0"


def test_peak_counts_held_droplets():
    plan = Plan(
        targets=(QUARTER,),
        steps=(
            PlanStep(1, SAMPLE, BUFFER, HALF),
            PlanStep(2, Source.output(1, 0), BUFFER, QUARTER, Disposition.target(0), WASTE),
        ),
    )
    trace = execute(plan)
    assert trace.ok
    assert trace.stats.peak_storage == 2
    assert [r.occupancy for r in trace.records] == [2, 1]
    assert trace.snapshots[-1] == ("1/2",)
    assert trace.stats.n_waste == 2


def test_unavailable_input():
    plan = Plan(targets=(QUARTER,), steps=(PlanStep(1, Source.output(7, 0), BUFFER, QUARTER, Disposition.target(0), WASTE),))
    trace = execute(plan)
    assert UNAVAILABLE in kinds(trace)
    assert not check_conservation(trace).ok


def test_double_consumption():
    plan = Plan(
        targets=(QUARTER,),
        steps=(
            PlanStep(1, SAMPLE, BUFFER, HALF, STORE, WASTE),
            PlanStep(2, Source.output(1, 0), BUFFER, QUARTER, Disposition.target(0), WASTE),
            PlanStep(3, Source.output(1, 0), BUFFER, QUARTER, WASTE, WASTE),
        ),
    )
    assert DOUBLE_CONSUMPTION in kinds(execute(plan))


def test_cf_mismatch_and_unmet():
    plan = Plan(targets=(QUARTER,), steps=(PlanStep(1, SAMPLE, BUFFER, QUARTER, Disposition.target(0), WASTE),))
    assert CF_MISMATCH in kinds(execute(plan))

    plan = Plan(targets=(HALF, HALF), steps=(PlanStep(1, SAMPLE, BUFFER, HALF, Disposition.target(0), WASTE),))
    assert kinds(execute(plan)) == [UNMET_TARGET]


def test_double_satisfied():
    plan = Plan(targets=(HALF,), steps=(PlanStep(1, SAMPLE, BUFFER, HALF, Disposition.target(0), Disposition.target(0)),))
    assert DOUBLE_SATISFIED in kinds(execute(plan))


def test_direct_dispense_must_use_dispenser():
    plan = Plan(
        targets=(HALF, HALF),
        steps=(PlanStep(1, SAMPLE, BUFFER, HALF, Disposition.target(0), STORE),),
        direct_dispenses=((1, Source.output(1, 1)),),
    )
    assert UNAVAILABLE in kinds(execute(plan))


def test_assert_conserved_raises_on_bad_plan():
    plan = Plan(targets=(QUARTER,), steps=(PlanStep(1, SAMPLE, BUFFER, QUARTER, Disposition.target(0), WASTE),))
    with pytest.raises(ConservationError):
        assert_conserved(execute(plan))


def test_empty_plan():
    trace = execute(Plan(targets=()))
    assert trace.ok
    assert trace.stats.summary() == "S=0 B=0 W=0 steps=0 peak=0"
