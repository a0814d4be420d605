# dilution_planner/plan/baseline.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..conc import ONE, ZERO, ConcFactor, mix
from ..models import BUFFER, SAMPLE, STORE, WASTE, Disposition, Plan, PlanStep, Source


@dataclass(frozen=True)
class BitSchedule:
    """
    Bit-serial mix partners for k/2^d.

    partners[0] = bit 0 of k, partners[1] = buffer, partners[j] = bit j-1
    for j = 2..d. Folding c1 = (p0 + p1)/2, cj = (c(j-1) + pj)/2 gives k/2^d.
    """
    target: ConcFactor
    partners: tuple[Source, ...]

    def intermediates(self) -> list[ConcFactor]:
        out: list[ConcFactor] = []
        if len(self.partners) < 2:
            return out
        c = mix(self.partners[0].cf, self.partners[1].cf)
        out.append(c)
        for p in self.partners[2:]:
            c = mix(c, p.cf)
            out.append(c)
        return out


def bit_schedule(t: ConcFactor) -> BitSchedule:
    if t.is_pure:
        return BitSchedule(target=t, partners=())
    k, d = t.num, t.prec

    def bit(i: int) -> Source:
        return SAMPLE if (k >> i) & 1 else BUFFER

    partners = [bit(0), BUFFER] + [bit(j - 1) for j in range(2, d + 1)]
    return BitSchedule(target=t, partners=tuple(partners))


def _chain_steps(t: ConcFactor, *, target_index: int, first_id: int) -> list[PlanStep]:
    sched = bit_schedule(t)
    cfs = sched.intermediates()
    steps: list[PlanStep] = []
    for j, cf in enumerate(cfs):
        sid = first_id + j
        if j == 0:
            a, b = sched.partners[0], sched.partners[1]
        else:
            a, b = Source.output(sid - 1, 0), sched.partners[j + 1]
        last = j == len(cfs) - 1
        steps.append(
            PlanStep(
                id=sid,
                input_a=a,
                input_b=b,
                out_cf=cf,
                disposition_a=Disposition.target(target_index) if last else STORE,
                disposition_b=WASTE,
            )
        )
    return steps


def _dispenser_for(t: ConcFactor) -> Source:
    return SAMPLE if t == ONE else BUFFER


def two_way_mix_single(t: ConcFactor) -> Plan:
    """Standard bit-serial dilution: d steps, the spare output of each step is waste."""
    if t == ONE or t == ZERO:
        return Plan(targets=(t,), direct_dispenses=((0, _dispenser_for(t)),), algorithm="twowaymix")
    steps = _chain_steps(t, target_index=0, first_id=1)
    return Plan(targets=(t,), steps=tuple(steps), algorithm="twowaymix")


def naive_multi(targets: Sequence[ConcFactor]) -> Plan:
    """Independent bit-serial preparation of every occurrence, no reuse."""
    steps: list[PlanStep] = []
    direct: list[tuple[int, Source]] = []
    for i, t in enumerate(targets):
        if t.is_pure:
            direct.append((i, _dispenser_for(t)))
            continue
        steps.extend(_chain_steps(t, target_index=i, first_id=len(steps) + 1))
    return Plan(targets=tuple(targets), steps=tuple(steps), direct_dispenses=tuple(direct), algorithm="naive")
