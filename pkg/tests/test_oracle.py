# tests/test_oracle.py
from __future__ import annotations

import itertools

import pytest

from dilution_planner.conc import ConcFactor
from dilution_planner.execute import assert_conserved, execute
from dilution_planner.plan.oracle import INFEASIBLE, OPTIMAL, UNKNOWN, SearchState, min_cost_plan
from dilution_planner.plan.policy import SearchCaps
from dilution_planner.storage.plan_files import load_series_fixtures

cf = ConcFactor


def solve(targets, objective="samples", **caps):
    result = min_cost_plan(targets, SearchCaps(**caps), objective)
    assert result.status == OPTIMAL, result.status
    trace = execute(result.plan)
    assert trace.ok, trace.violations
    assert_conserved(trace)
    assert trace.stats.cost() == result.cost
    return result, trace.stats


def test_single_half():
    result, stats = solve([cf(1, 1)])
    assert result.cost == (1, 1, 1)
    assert result.plan.algorithm == "oracle"


def test_three_quarters_needs_two_steps():
    _, stats = solve([cf(3, 2)])
    assert (stats.n_steps, stats.n_sample) == (2, 2)


def test_duplicate_half_shares_one_step():
    _, stats = solve([cf(1, 1), cf(1, 1)])
    assert stats.summary() == "S=1 B=1 W=0 steps=1 peak=0"


def test_pure_targets_only():
    result, stats = solve([cf(1, 0), cf(0, 0)])
    assert result.cost == (1, 0, 1)
    assert stats.n_steps == 0


def test_target_above_precision_cap_is_none():
    result = min_cost_plan([cf(1, 6)], SearchCaps(max_precision=5))
    assert result.status == INFEASIBLE and result.plan is None


def test_step_cap_too_tight_is_none():
    result = min_cost_plan([cf(1, 4)], SearchCaps(max_steps=3))
    assert result.status == INFEASIBLE


def test_budget_exhaustion_is_unknown():
    ts1 = load_series_fixtures()["ts1"]
    result = min_cost_plan(ts1, SearchCaps(time_budget_s=1e-6, prune=False))
    assert result.status == UNKNOWN
    assert result.plan is None and result.expanded > 0


def test_canonical_states_compare_equal():
    a = SearchState(held=tuple(sorted([cf(1, 1), cf(1, 2)])), pending=(cf(3, 2),))
    b = SearchState(held=tuple(sorted([cf(1, 2), cf(1, 1)])), pending=(cf(3, 2),))
    assert a == b and a.key == b.key


@pytest.mark.parametrize("d", range(1, 5))
def test_single_target_min_steps_is_precision(d):
    for k in range(1, 1 << d, 2):
        result, stats = solve([cf(k, d)], objective="steps")
        assert stats.n_steps == d


def _small_instances():
    values = [cf(k, d) for d in range(1, 4) for k in range(1, 1 << d, 2)]
    yield from ([v] for v in values)
    yield from (list(p) for p in itertools.combinations(values, 2))


@pytest.mark.slow
@pytest.mark.parametrize("objective", ["samples", "steps"])
def test_pruning_keeps_optimum(objective):
    for targets in _small_instances():
        pruned = min_cost_plan(targets, SearchCaps(max_precision=3, max_steps=8), objective)
        plain = min_cost_plan(targets, SearchCaps(max_precision=3, max_steps=8, prune=False), objective)
        assert pruned.status == plain.status == OPTIMAL
        assert pruned.cost == plain.cost, [str(t) for t in targets]


def test_pruning_keeps_optimum_quick():
    for targets in ([cf(3, 2)], [cf(5, 3)], [cf(1, 2), cf(3, 2)]):
        pruned = min_cost_plan(targets, SearchCaps(max_precision=3, max_steps=6))
        plain = min_cost_plan(targets, SearchCaps(max_precision=3, max_steps=6, prune=False))
        assert pruned.cost == plain.cost


def test_deterministic_witness():
    a = min_cost_plan([cf(3, 2), cf(1, 2)])
    b = min_cost_plan([cf(3, 2), cf(1, 2)])
    assert a.plan == b.plan


@pytest.mark.slow
def test_ts1_sample_optimum():
    ts1 = load_series_fixtures()["ts1"]
    result, stats = solve(ts1, max_steps=8, max_droplets=6, time_budget_s=600)
    assert stats.n_sample == 5
    assert stats.n_steps <= 8
