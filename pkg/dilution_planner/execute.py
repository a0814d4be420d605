# dilution_planner/execute.py
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .conc import ONE, ZERO, ConcFactor, mix
from .errors import ConservationError
from .models import Plan, PlanStats, Source
from .utils_debug import dbg

UNAVAILABLE = "unavailable-input"
CF_MISMATCH = "cf-mismatch"
DOUBLE_CONSUMPTION = "double-consumption"
UNMET_TARGET = "unmet-target"
DOUBLE_SATISFIED = "double-satisfied"
MALFORMED = "malformed"


@dataclass(frozen=True)
class Violation:
    kind: str
    step: Optional[int]
    message: str

    def __str__(self) -> str:
        where = f"step {self.step}" if self.step is not None else "plan"
        return f"{self.kind} at {where}: {self.message}"


@dataclass(frozen=True)
class StepRecord:
    step_id: int
    input_cfs: tuple[Optional[ConcFactor], Optional[ConcFactor]]
    out_cf: ConcFactor
    occupancy: int
    snapshot_id: int


@dataclass(frozen=True)
class ExecutionTrace:
    plan: Plan
    records: tuple[StepRecord, ...]
    snapshots: tuple[tuple[str, ...], ...]
    stats: PlanStats
    violations: tuple[Violation, ...]
    delivered: tuple[ConcFactor, ...]
    wasted: tuple[ConcFactor, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class ConservationVerdict:
    ok: bool
    droplets_in: int
    droplets_out: int
    sample_mass_in: Fraction
    sample_mass_out: Fraction
    message: str = ""


class _Chip:
    """Virtual chip state for one replay."""

    def __init__(self, plan: Plan):
        self.plan = plan
        self.held: dict[tuple[int, int], ConcFactor] = {}
        self.consumed: set[tuple[int, int]] = set()
        self.satisfied: set[int] = set()
        self.violations: list[Violation] = []
        self.delivered: list[ConcFactor] = []
        self.wasted: list[ConcFactor] = []
        self.n_sample = 0
        self.n_buffer = 0

    def flag(self, kind: str, step: Optional[int], message: str) -> None:
        self.violations.append(Violation(kind=kind, step=step, message=message))

    def draw(self, src: Source, step: Optional[int], used: set[tuple[int, int]]) -> Optional[ConcFactor]:
        if src.kind == "sample":
            self.n_sample += 1
            return ONE
        if src.kind == "buffer":
            self.n_buffer += 1
            return ZERO
        if src.kind != "step":
            self.flag(MALFORMED, step, f"unknown source kind {src.kind!r}")
            return None

        key = (src.step, src.index)
        if key in self.consumed or key in used:
            self.flag(DOUBLE_CONSUMPTION, step, f"droplet {src.ref} was already consumed")
            return None
        if key not in self.held:
            self.flag(UNAVAILABLE, step, f"droplet {src.ref} is not held on chip")
            return None

        used.add(key)
        self.consumed.add(key)
        return self.held.pop(key)

    def deliver(self, index: Optional[int], cf: ConcFactor, step: Optional[int]) -> None:
        targets = self.plan.targets
        self.delivered.append(cf)
        if index is None or not 0 <= index < len(targets):
            self.flag(MALFORMED, step, f"target index {index} is out of range")
        elif index in self.satisfied:
            self.flag(DOUBLE_SATISFIED, step, f"target {index} is already satisfied")
        elif cf != targets[index]:
            self.flag(CF_MISMATCH, step, f"target {index} wants {targets[index]}, got {cf}")
        else:
            self.satisfied.add(index)


def execute(plan: Plan) -> ExecutionTrace:
    """
    Replay a plan on a virtual chip.

    Never raises for a bad plan; every problem becomes a Violation.
    """
    chip = _Chip(plan)
    records: list[StepRecord] = []
    snapshots: list[tuple[str, ...]] = []
    seen_ids: set[int] = set()
    peak = 0

    for step in plan.steps:
        if step.id in seen_ids:
            chip.flag(MALFORMED, step.id, "duplicate step id")
            continue
        seen_ids.add(step.id)

        try:
            used: set[tuple[int, int]] = set()
            in_a = chip.draw(step.input_a, step.id, used)
            in_b = chip.draw(step.input_b, step.id, used)

            if in_a is not None and in_b is not None:
                expected = mix(in_a, in_b)
                if expected != step.out_cf:
                    chip.flag(CF_MISMATCH, step.id, f"inputs mix to {expected}, step claims {step.out_cf}")

            for idx, disp in enumerate(step.dispositions):
                if disp.kind == "store":
                    chip.held[(step.id, idx)] = step.out_cf
                elif disp.kind == "waste":
                    chip.wasted.append(step.out_cf)
                elif disp.kind == "target":
                    chip.deliver(disp.index, step.out_cf, step.id)
                else:
                    chip.flag(MALFORMED, step.id, f"unknown disposition {disp.kind!r}")
        except Exception as e:
            chip.flag(MALFORMED, getattr(step, "id", None), f"step could not be replayed: {e}")
            continue

        peak = max(peak, len(chip.held))
        snapshots.append(tuple(str(cf) for cf in chip.held.values()))
        records.append(
            StepRecord(
                step_id=step.id,
                input_cfs=(in_a, in_b),
                out_cf=step.out_cf,
                occupancy=len(chip.held),
                snapshot_id=len(snapshots) - 1,
            )
        )

    for index, src in plan.direct_dispenses:
        if not src.is_dispenser:
            chip.flag(UNAVAILABLE, None, f"direct dispense for target {index} must use a dispenser, got {src.ref}")
            continue
        cf = chip.draw(src, None, set())
        if cf is not None:
            chip.deliver(index, cf, None)

    leftovers = list(chip.held.values())
    chip.wasted.extend(leftovers)

    for i in range(len(plan.targets)):
        if i not in chip.satisfied:
            chip.flag(UNMET_TARGET, None, f"target {i} ({plan.targets[i]}) is never satisfied")

    stats = PlanStats(
        n_sample=chip.n_sample,
        n_buffer=chip.n_buffer,
        n_waste=len(chip.wasted),
        n_steps=len(plan.steps),
        peak_storage=peak,
    )

    if chip.violations:
        dbg("exec.violations", algorithm=plan.algorithm, count=len(chip.violations))

    return ExecutionTrace(
        plan=plan,
        records=tuple(records),
        snapshots=tuple(snapshots),
        stats=stats,
        violations=tuple(chip.violations),
        delivered=tuple(chip.delivered),
        wasted=tuple(chip.wasted),
    )


def check_conservation(trace: ExecutionTrace) -> ConservationVerdict:
    """
    Droplet-count and sample-mass balance over a replay.

    count: samples + buffers = delivered + waste
    mass:  samples = sum of CF over every delivered and wasted droplet
    """
    s = trace.stats
    droplets_in = s.n_sample + s.n_buffer
    droplets_out = len(trace.delivered) + s.n_waste
    mass_in = Fraction(s.n_sample)
    mass_out = sum((cf.value for cf in trace.delivered), Fraction(0)) + sum(
        (cf.value for cf in trace.wasted), Fraction(0)
    )

    problems: list[str] = []
    if droplets_in != droplets_out:
        problems.append(
            f"droplet count {s.n_sample} + {s.n_buffer} != {len(trace.delivered)} + {s.n_waste}"
        )
    if mass_in != mass_out:
        problems.append(f"sample mass {mass_in} != {mass_out}")
    if trace.violations:
        problems.append(f"trace has {len(trace.violations)} violation(s)")

    return ConservationVerdict(
        ok=not problems,
        droplets_in=droplets_in,
        droplets_out=droplets_out,
        sample_mass_in=mass_in,
        sample_mass_out=mass_out,
        message="; ".join(problems),
    )


def assert_conserved(trace: ExecutionTrace) -> ConservationVerdict:
    verdict = check_conservation(trace)
    if not verdict.ok:
        raise ConservationError(verdict.message)
    return verdict
