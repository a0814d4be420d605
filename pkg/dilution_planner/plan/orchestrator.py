# dilution_planner/plan/orchestrator.py
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional, Sequence

from ..conc import ConcFactor
from ..errors import PlannerError
from ..execute import ExecutionTrace, execute
from ..models import Plan
from ..utils_debug import dbg
from . import emdp
from .baseline import naive_multi, two_way_mix_single
from .oracle import OPTIMAL, UNKNOWN, min_cost_plan
from .policy import PlannerConfig, SearchCaps

ProgressCB = Callable[[int, int, str], None]
Planner = Callable[[Sequence[ConcFactor]], Plan]

ALGORITHMS = ("emdp", "naive", "twowaymix", "oracle")
OUTSIDE_CAPS = "outside-caps"


@dataclass(frozen=True)
class ComparisonRow:
    series: str
    algorithm: str
    n_targets: int
    status: str  # "ok" | "invalid" | oracle status
    n_sample: Optional[int] = None
    n_buffer: Optional[int] = None
    n_waste: Optional[int] = None
    n_steps: Optional[int] = None
    peak_storage: Optional[int] = None
    plan: Optional[Plan] = None

    @property
    def peak_ratio(self) -> Optional[float]:
        if self.peak_storage is None or not self.n_targets:
            return None
        return self.peak_storage / self.n_targets

    @property
    def input_droplets(self) -> Optional[int]:
        if self.n_sample is None or self.n_buffer is None:
            return None
        return self.n_sample + self.n_buffer


@dataclass(frozen=True)
class GapRow:
    targets: tuple[ConcFactor, ...]
    status: str  # oracle status, or "outside-caps"
    planner_cost: tuple[int, int, int]
    oracle_cost: Optional[tuple[int, int, int]] = None

    @property
    def gap(self) -> Optional[tuple[int, int, int]]:
        if self.oracle_cost is None:
            return None
        return tuple(p - o for p, o in zip(self.planner_cost, self.oracle_cost))  # type: ignore[return-value]


def _row(series: str, algorithm: str, targets: Sequence[ConcFactor], plan: Plan, trace: ExecutionTrace) -> ComparisonRow:
    s = trace.stats
    return ComparisonRow(
        series=series,
        algorithm=algorithm,
        n_targets=len(targets),
        status="ok" if trace.ok else "invalid",
        n_sample=s.n_sample,
        n_buffer=s.n_buffer,
        n_waste=s.n_waste,
        n_steps=s.n_steps,
        peak_storage=s.peak_storage,
        plan=plan,
    )


def run_algorithm(
    algorithm: str,
    targets: Sequence[ConcFactor],
    *,
    config: Optional[PlannerConfig] = None,
    caps: Optional[SearchCaps] = None,
    objective: str = "samples",
) -> tuple[str, Optional[Plan]]:
    """
    Plan with one algorithm. Returns (status, plan); status is "ok" for
    the heuristics and the oracle's verdict otherwise.
    """
    if algorithm == "emdp":
        return "ok", emdp.plan(targets, config)
    if algorithm == "naive":
        return "ok", naive_multi(targets)
    if algorithm == "twowaymix":
        if len(targets) != 1:
            return "ok", naive_multi(targets)
        return "ok", two_way_mix_single(targets[0])
    if algorithm == "oracle":
        result = min_cost_plan(targets, caps, objective)
        return result.status, result.plan
    raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")


def compare_series(
    named_series: Sequence[tuple[str, Sequence[ConcFactor]]],
    *,
    algorithms: Sequence[str] = ("emdp", "naive"),
    config: Optional[PlannerConfig] = None,
    caps: Optional[SearchCaps] = None,
    progress_cb: Optional[ProgressCB] = None,
) -> list[ComparisonRow]:
    rows: list[ComparisonRow] = []
    total = len(named_series) * len(algorithms)
    done = 0

    for name, targets in named_series:
        targets = tuple(targets)
        for algorithm in algorithms:
            done += 1
            if progress_cb:
                progress_cb(done, total, f"{name}: {algorithm}")

            status, plan = run_algorithm(algorithm, targets, config=config, caps=caps)
            if plan is None:
                row = ComparisonRow(series=name, algorithm=algorithm, n_targets=len(targets), status=status)
            else:
                row = _row(name, algorithm, targets, plan, execute(plan))
                if algorithm == "oracle":
                    row = replace(row, status=status if row.status == "ok" else row.status)

            dbg("compare.row", series=name, algorithm=algorithm, status=row.status, samples=row.n_sample, steps=row.n_steps)
            rows.append(row)

    return rows


def max_peak_ratio(rows: Sequence[ComparisonRow], algorithm: str = "emdp") -> Optional[float]:
    ratios = [r.peak_ratio for r in rows if r.algorithm == algorithm and r.peak_ratio is not None]
    return max(ratios) if ratios else None


def reduction_vs(rows: Sequence[ComparisonRow], *, algorithm: str = "emdp", baseline: str = "naive") -> dict[str, Optional[float]]:
    """
    Aggregate relative saving of `algorithm` over `baseline` in samples,
    buffers and waste, over series that have valid rows for both.
    """
    by_key = {(r.series, r.algorithm): r for r in rows if r.status in ("ok", OPTIMAL)}
    series = sorted({s for s, a in by_key if a == algorithm} & {s for s, a in by_key if a == baseline})

    out: dict[str, Optional[float]] = {}
    for field_name, label in (("n_sample", "samples"), ("n_buffer", "buffers"), ("n_waste", "waste")):
        ours = sum(getattr(by_key[(s, algorithm)], field_name) for s in series)
        theirs = sum(getattr(by_key[(s, baseline)], field_name) for s in series)
        out[label] = float(1 - Fraction(ours, theirs)) if theirs else None
    return out


def dominance_failures(rows: Sequence[ComparisonRow], *, algorithm: str = "emdp", baseline: str = "naive") -> list[str]:
    """Series where `algorithm` uses more samples than `baseline`."""
    by_key = {(r.series, r.algorithm): r for r in rows}
    failures: list[str] = []
    for (name, algo), row in by_key.items():
        if algo != algorithm:
            continue
        other = by_key.get((name, baseline))
        if other is None or row.n_sample is None or other.n_sample is None:
            continue
        if row.n_sample > other.n_sample:
            failures.append(name)
    return failures


def _fits(trace: ExecutionTrace, caps: SearchCaps) -> bool:
    """
    Whether the oracle could replay this plan: steps, precision and held
    droplets (plus one slot for an output wasted at production) within caps.
    """
    s = trace.stats
    top = max((step.out_cf.prec for step in trace.plan.steps), default=0)
    return s.n_steps <= caps.max_steps and top <= caps.max_precision and s.peak_storage + 1 <= caps.max_droplets


def optimality_gap(
    planner: Planner,
    instances: Sequence[Sequence[ConcFactor]],
    *,
    caps: Optional[SearchCaps] = None,
    objective: str = "samples",
    progress_cb: Optional[ProgressCB] = None,
) -> list[GapRow]:
    """
    Planner cost against the oracle per instance.

    A planner plan cheaper than the oracle's raises PlannerError: one of
    the two is wrong. Plans larger than the caps and "unknown" verdicts are
    reported, not checked.
    """
    caps = caps or SearchCaps()
    rows: list[GapRow] = []

    for n, targets in enumerate(instances, start=1):
        targets = tuple(targets)
        if progress_cb:
            progress_cb(n, len(instances), " ".join(str(t) for t in targets))

        trace = execute(planner(targets))
        if not trace.ok:
            raise PlannerError(f"planner produced an invalid plan for {[str(t) for t in targets]}: {trace.violations[0]}")
        planner_cost = trace.stats.cost(objective)

        fits = _fits(trace, caps)
        result = min_cost_plan(targets, caps, objective)

        if result.status == OPTIMAL and result.cost is not None:
            oracle_cost = result.cost if objective == "samples" else (result.cost[1], result.cost[0], result.cost[2])
            if fits and planner_cost < oracle_cost:
                raise PlannerError(
                    f"planner cost {planner_cost} beats oracle cost {oracle_cost} on {[str(t) for t in targets]}"
                )
            status = OPTIMAL if fits else OUTSIDE_CAPS
            rows.append(GapRow(targets=targets, status=status, planner_cost=planner_cost, oracle_cost=oracle_cost))
        else:
            status = result.status if result.status == UNKNOWN or fits else OUTSIDE_CAPS
            rows.append(GapRow(targets=targets, status=status, planner_cost=planner_cost))

    return rows
