# dilution_planner/plan/oracle.py
from __future__ import annotations

import heapq
import math
import time
from collections import Counter, defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ..config import ORACLE_CLOCK_EVERY
from ..conc import ONE, ZERO, ConcFactor, mix
from ..models import BUFFER, SAMPLE, WASTE, Disposition, Plan, Source, StepDraft
from ..utils_debug import dbg
from .policy import OBJECTIVES, SearchCaps

OPTIMAL = "optimal"
INFEASIBLE = "none"
UNKNOWN = "unknown"

StateKey = tuple[tuple[ConcFactor, ...], tuple[ConcFactor, ...]]
Cost = tuple[int, int, int]  # samples, steps, buffers


@dataclass(frozen=True)
class SearchState:
    """Canonical node: held droplets and unmet targets as sorted multisets."""
    held: tuple[ConcFactor, ...]
    pending: tuple[ConcFactor, ...]

    @property
    def key(self) -> StateKey:
        return (self.held, self.pending)


@dataclass(frozen=True)
class Action:
    kind: str  # "mix" | "discard"
    a: ConcFactor = ZERO
    b: ConcFactor = ZERO
    delivered: int = 0


@dataclass(frozen=True)
class OracleResult:
    status: str
    plan: Optional[Plan] = None
    cost: Optional[Cost] = None
    expanded: int = 0
    elapsed_s: float = 0.0

    @property
    def found(self) -> bool:
        return self.status == OPTIMAL


def _without(items: tuple[ConcFactor, ...], *drop: ConcFactor) -> Optional[list[ConcFactor]]:
    out = list(items)
    for cf in drop:
        try:
            out.remove(cf)
        except ValueError:
            return None
    return out


def _bound(state: SearchState) -> tuple[int, int]:
    """Lower bounds on (remaining samples, remaining steps)."""
    if not state.pending:
        return (0, 0)
    deficit = sum((t.value for t in state.pending), Fraction(0)) - sum((c.value for c in state.held), Fraction(0))
    samples = max(0, math.ceil(deficit))
    top = max((c.prec for c in state.held), default=0)
    steps = max(max(1, t.prec - top) for t in state.pending)
    return (samples, steps)


def _priority(g: Cost, h: tuple[int, int], objective: str) -> Cost:
    samples, steps, buffers = g[0] + h[0], g[1] + h[1], g[2]
    if objective == "steps":
        return (steps, samples, buffers)
    return (samples, steps, buffers)


def _successors(state: SearchState, caps: SearchCaps):
    """Yield (action, child, (d_samples, d_steps, d_buffers)) in (cf_a, cf_b) order."""
    options = [ZERO] + sorted(set(state.held)) + [ONE]
    pending_count = Counter(state.pending)

    for i, a in enumerate(options):
        for b in options[i + 1:]:
            held_drop = [cf for cf in (a, b) if cf not in (ZERO, ONE)]
            rest = _without(state.held, *held_drop)
            if rest is None:
                continue
            out = mix(a, b)
            if out.prec > caps.max_precision:
                continue

            d_samples = (a == ONE) + (b == ONE)
            d_buffers = (a == ZERO) + (b == ZERO)
            for k in range(min(2, pending_count[out]), -1, -1):
                held = rest + [out] * (2 - k)
                if len(held) > caps.max_droplets:
                    continue
                pending = _without(state.pending, *([out] * k))
                child = SearchState(tuple(sorted(held)), tuple(sorted(pending)))
                yield Action("mix", a, b, k), child, (d_samples, 1, d_buffers)

    if len(state.held) + 2 > caps.max_droplets:
        for cf in sorted(set(state.held)):
            rest = _without(state.held, cf)
            child = SearchState(tuple(rest), state.pending)
            yield Action("discard", cf, cf), child, (0, 0, 0)


def _build_plan(targets: tuple[ConcFactor, ...], path: list[Action]) -> Plan:
    held_src: dict[ConcFactor, deque[Source]] = defaultdict(deque)
    pending_idx: dict[ConcFactor, deque[int]] = defaultdict(deque)
    direct: list[tuple[int, Source]] = []
    for i, t in enumerate(targets):
        if t == ONE:
            direct.append((i, SAMPLE))
        elif t == ZERO:
            direct.append((i, BUFFER))
        else:
            pending_idx[t].append(i)

    steps: list[StepDraft] = []

    def take(cf: ConcFactor) -> Source:
        if cf == ONE:
            return SAMPLE
        if cf == ZERO:
            return BUFFER
        return held_src[cf].popleft()

    for act in path:
        if act.kind == "discard":
            src = held_src[act.a].popleft()
            steps[src.step - 1].dispositions[src.index] = WASTE
            continue

        draft = StepDraft(id=len(steps) + 1, input_a=take(act.a), input_b=take(act.b), out_cf=mix(act.a, act.b))
        for idx in range(2):
            if idx < act.delivered:
                draft.dispositions[idx] = Disposition.target(pending_idx[draft.out_cf].popleft())
            else:
                held_src[draft.out_cf].append(Source.output(draft.id, idx))
        steps.append(draft)

    return Plan(
        targets=targets,
        steps=tuple(d.freeze() for d in steps),
        direct_dispenses=tuple(direct),
        algorithm="oracle",
    )


def min_cost_plan(
    targets: Sequence[ConcFactor],
    caps: Optional[SearchCaps] = None,
    objective: str = "samples",
) -> OracleResult:
    """
    Provably minimal plan within caps, by A* over canonical states.

    objective "samples" orders costs (samples, steps, buffers), "steps"
    orders them (steps, samples, buffers). Returns status "none" when no
    plan fits the caps and "unknown" when the time budget runs out.
    """
    caps = caps or SearchCaps()
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")

    targets = tuple(targets)
    started = time.monotonic()
    pure_samples = sum(1 for t in targets if t == ONE)
    pure_buffers = sum(1 for t in targets if t == ZERO)
    pending = tuple(sorted(t for t in targets if not t.is_pure))

    dbg("oracle.start", targets=[str(t) for t in targets], caps=caps, objective=objective)

    if any(t.prec > caps.max_precision for t in pending):
        return OracleResult(status=INFEASIBLE, elapsed_s=time.monotonic() - started)

    root = SearchState(held=(), pending=pending)
    g0: Cost = (pure_samples, 0, pure_buffers)
    zero_bound = (0, 0)

    def bound(s: SearchState) -> tuple[int, int]:
        return _bound(s) if caps.prune else zero_bound

    best_g: dict[StateKey, Cost] = {root.key: g0}
    parent: dict[StateKey, tuple[Optional[StateKey], Optional[Action]]] = {root.key: (None, None)}
    closed: set[StateKey] = set()
    seq = 0
    heap: list[tuple[Cost, int, StateKey, SearchState]] = [(_priority(g0, bound(root), objective), seq, root.key, root)]
    expanded = 0

    while heap:
        _, _, key, state = heapq.heappop(heap)
        if key in closed:
            continue
        closed.add(key)
        g = best_g[key]

        if not state.pending:
            path: list[Action] = []
            k: Optional[StateKey] = key
            while k is not None:
                pk, act = parent[k]
                if act is not None:
                    path.append(act)
                k = pk
            path.reverse()
            plan = _build_plan(targets, path)
            elapsed = time.monotonic() - started
            dbg("oracle.done", status=OPTIMAL, cost=g, expanded=expanded, elapsed=round(elapsed, 3))
            return OracleResult(status=OPTIMAL, plan=plan, cost=g, expanded=expanded, elapsed_s=elapsed)

        expanded += 1
        if expanded % ORACLE_CLOCK_EVERY == 0 and time.monotonic() - started > caps.time_budget_s:
            elapsed = time.monotonic() - started
            dbg("oracle.budget", expanded=expanded, elapsed=round(elapsed, 3))
            return OracleResult(status=UNKNOWN, expanded=expanded, elapsed_s=elapsed)

        for action, child, delta in _successors(state, caps):
            g_child: Cost = (g[0] + delta[0], g[1] + delta[1], g[2] + delta[2])
            if g_child[1] > caps.max_steps:
                continue
            h = bound(child)
            if g_child[1] + h[1] > caps.max_steps:
                continue

            ck = child.key
            if ck in closed:
                continue
            prev = best_g.get(ck)
            if prev is not None and _priority(prev, zero_bound, objective) <= _priority(g_child, zero_bound, objective):
                continue

            best_g[ck] = g_child
            parent[ck] = (key, action)
            seq += 1
            heapq.heappush(heap, (_priority(g_child, h, objective), seq, ck, child))

    elapsed = time.monotonic() - started
    dbg("oracle.done", status=INFEASIBLE, expanded=expanded, elapsed=round(elapsed, 3))
    return OracleResult(status=INFEASIBLE, expanded=expanded, elapsed_s=elapsed)
