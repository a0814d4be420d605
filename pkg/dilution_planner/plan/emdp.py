# dilution_planner/plan/emdp.py
from __future__ import annotations

from collections import defaultdict, deque
from typing import Callable, Optional, Sequence

from ..conc import HALF, ONE, ZERO, ConcFactor, complement, mix
from ..errors import CapacityError, PlannerError, PrecisionError
from ..execute import execute
from ..models import (
    BUFFER,
    SAMPLE,
    WASTE,
    Disposition,
    Droplet,
    Plan,
    Source,
    StepDraft,
)
from ..storage.inventory import Inventory
from ..utils import common_precision, popcount
from ..utils_debug import dbg
from .baseline import bit_schedule, naive_multi
from .policy import PlannerConfig


class PlannerState:
    """
    Working state of one EMDP run: storage, unmet target occurrences,
    emitted steps and dispenser counters.
    """

    def __init__(self, targets: Sequence[ConcFactor], *, storage_capacity: Optional[int] = None):
        self.targets = tuple(targets)
        self.inventory = Inventory(capacity=storage_capacity)
        self.pending: dict[ConcFactor, deque[int]] = defaultdict(deque)
        for i, t in enumerate(self.targets):
            self.pending[t].append(i)

        self.steps: list[StepDraft] = []
        self.direct: list[tuple[int, Source]] = []
        self.n_sample = 0
        self.n_buffer = 0

        # Every created CF lies on the 2^grid lattice, strictly decreasing per level
        self.grid = common_precision(self.targets)
        self.depth_limit = (1 << self.grid) + 1

    # dispensers

    def sample(self) -> Droplet:
        self.n_sample += 1
        return Droplet(ONE, SAMPLE)

    def buffer(self) -> Droplet:
        self.n_buffer += 1
        return Droplet(ZERO, BUFFER)

    # steps and dispositions

    def emit(self, a: Droplet, b: Droplet) -> StepDraft:
        draft = StepDraft(
            id=len(self.steps) + 1,
            input_a=a.source,
            input_b=b.source,
            out_cf=mix(a.cf, b.cf),
        )
        self.steps.append(draft)
        return draft

    def set_disposition(self, src: Source, disp: Disposition) -> None:
        if src.kind != "step":
            raise PlannerError(f"cannot set a disposition on dispenser droplet {src.ref}")
        self.steps[src.step - 1].dispositions[src.index] = disp

    def store(self, droplet: Droplet) -> None:
        evicted = self.inventory.store(droplet)
        if evicted is not None:
            self.set_disposition(evicted.source, WASTE)
            dbg("emdp.evict", cf=str(evicted.cf), ref=evicted.source.ref)

    def place_sibling(self, draft: StepDraft) -> None:
        """Output b goes to another pending occurrence of its CF, else to storage."""
        q = self.pending.get(draft.out_cf)
        if q:
            draft.dispositions[1] = Disposition.target(q.popleft())
            return
        self.store(Droplet(draft.out_cf, Source.output(draft.id, 1)))

    def to_plan(self) -> Plan:
        return Plan(
            targets=self.targets,
            steps=tuple(d.freeze() for d in self.steps),
            direct_dispenses=tuple(self.direct),
            algorithm="emdp",
        )


def _double(t: ConcFactor) -> ConcFactor:
    if t >= HALF:
        return ONE
    return ConcFactor(t.num, t.prec - 1)


def serial_dilution_tree(state: PlannerState, t: ConcFactor) -> Optional[Droplet]:
    """
    Halve a fresh sample droplet with buffer until the ladder brackets t.

    Returns a droplet of CF t on an exact hit; otherwise both outputs of the
    last halving are stored and None is returned.
    """
    if t.is_pure:
        raise ValueError(f"serial dilution needs 0 < t < 1, got {t}")

    current = state.sample()
    while True:
        draft = state.emit(current, state.buffer())
        half = draft.out_cf
        out_a = Droplet(half, Source.output(draft.id, 0))
        out_b = Droplet(half, Source.output(draft.id, 1))

        if half == t:
            state.place_sibling(draft)
            dbg("emdp.sdt", target=str(t), hit=True, steps=draft.id)
            return out_a

        if half > t:
            state.store(out_a)
            current = out_b
            continue

        state.store(out_a)
        state.store(out_b)
        dbg("emdp.sdt", target=str(t), hit=False, storage=state.inventory.snapshot())
        return None


def _complement_estimate(state: PlannerState, c: ConcFactor) -> tuple[int, int]:
    """Bit-serial (samples, steps) for a complement not already at hand."""
    if c == ZERO or state.inventory.contains(c):
        return (0, 0)
    return (popcount(c.num), c.prec)


def choose_anchor(state: PlannerState, t: ConcFactor) -> Optional[ConcFactor]:
    """
    Pick the droplet to dilute toward t.

    Admissible anchors are stored CFs in (t, 2t] and, for t >= 1/2, the
    sample dispenser. Lowest estimated (samples, steps) wins, ties go to
    the immediate higher CF, the anchor take_immediate_higher would return.
    """
    candidates = state.inventory.candidates_between(t, _double(t))
    if t >= HALF:
        candidates.append(ONE)
    if not candidates:
        return None

    scored = []
    for h in candidates:
        c = complement(t, h)
        samples, steps = _complement_estimate(state, c)
        if h == ONE:
            samples += 1
        scored.append(((samples, steps, h), h))

    best = min(scored)[1]
    dbg("emdp.anchor", target=str(t), anchor=str(best), scores=[(str(h), s[:2]) for s, h in scored])
    return best


def create_droplet(state: PlannerState, t: ConcFactor, *, depth: int = 0) -> Droplet:
    """
    Produce one droplet of CF t from storage, dispensers and recursion.

    The step's spare output serves another pending occurrence of t or is
    stored. The returned droplet is output a of the final step.
    """
    if t.is_pure:
        raise ValueError(f"create_droplet needs 0 < t < 1, got {t}")
    if depth > state.depth_limit:
        raise PlannerError(f"create_droplet recursion exceeded {state.depth_limit} levels at {t}")

    if len(state.inventory) == 0:
        hit = serial_dilution_tree(state, t)
        if hit is not None:
            return hit

    anchor = choose_anchor(state, t)
    if anchor is None:
        hit = serial_dilution_tree(state, t)
        if hit is not None:
            return hit
        anchor = choose_anchor(state, t)
        if anchor is None:
            raise CapacityError(f"storage capacity {state.inventory.capacity} cannot hold a ladder for {t}")

    if anchor == ONE:
        h = state.sample()
    else:
        h = state.inventory.take_exact(anchor)
        if h is None:
            raise PlannerError(f"anchor {anchor} vanished from storage")

    c = complement(t, h.cf)
    if c is None:
        raise PlannerError(f"anchor {h.cf} admits no complement for {t}")

    if c == ZERO:
        partner = state.buffer()
    else:
        partner = state.inventory.take_exact(c) or create_droplet(state, c, depth=depth + 1)

    draft = state.emit(h, partner)
    state.place_sibling(draft)
    dbg("emdp.create", target=str(t), anchor=str(h.cf), partner=str(partner.cf), step=draft.id, depth=depth)
    return Droplet(t, Source.output(draft.id, 0))


def bit_serial_droplet(state: PlannerState, t: ConcFactor) -> Droplet:
    """
    Build t with the bit-serial chain. Spare outputs serve pending
    occurrences of their CF or go to storage.
    """
    if t.is_pure:
        raise ValueError(f"bit-serial chain needs 0 < t < 1, got {t}")

    def dispense(src: Source) -> Droplet:
        return state.sample() if src == SAMPLE else state.buffer()

    partners = bit_schedule(t).partners
    current = dispense(partners[0])
    for p in partners[1:]:
        draft = state.emit(current, dispense(p))
        state.place_sibling(draft)
        current = Droplet(draft.out_cf, Source.output(draft.id, 0))
    dbg("emdp.chain", target=str(t), steps=len(partners) - 1)
    return current


Maker = Callable[[PlannerState, ConcFactor], Droplet]


def _satisfy(state: PlannerState, index: int, make: Maker = create_droplet) -> None:
    t = state.targets[index]
    q = state.pending[t]
    if not q or q[0] != index:
        # already served by a spare output
        return
    q.popleft()

    if t == ONE:
        state.direct.append((index, state.sample().source))
        return
    if t == ZERO:
        state.direct.append((index, state.buffer().source))
        return

    droplet = state.inventory.take_exact(t)
    if droplet is None:
        droplet = make(state, t)
    state.set_disposition(droplet.source, Disposition.target(index))


def _target_order(targets: Sequence[ConcFactor], order: str) -> list[int]:
    idx = list(range(len(targets)))
    if order == "descending":
        return sorted(idx, key=lambda i: targets[i], reverse=True)
    return idx


def _run(targets: Sequence[ConcFactor], order: str, config: PlannerConfig, make: Maker = create_droplet) -> Plan:
    state = PlannerState(targets, storage_capacity=config.storage_capacity)
    for i in _target_order(state.targets, order):
        _satisfy(state, i, make)
    dbg(
        "emdp.plan",
        order=order,
        maker=make.__name__,
        steps=len(state.steps),
        samples=state.n_sample,
        buffers=state.n_buffer,
        peak=state.inventory.peak,
        leftover=state.inventory.snapshot(),
    )
    return state.to_plan()


def _has_shared_duplicates(targets: Sequence[ConcFactor]) -> bool:
    mixed = [t for t in targets if not t.is_pure]
    return len(set(mixed)) < len(mixed)


def dominates_naive(plan: Plan, targets: Sequence[ConcFactor]) -> bool:
    """
    No more samples than independent bit-serial preparation, and strictly
    fewer input droplets when a mixed CF repeats.
    """
    ours = execute(plan).stats
    naive = execute(naive_multi(targets)).stats
    if ours.n_sample > naive.n_sample:
        return False
    if _has_shared_duplicates(targets):
        return ours.n_sample + ours.n_buffer < naive.n_sample + naive.n_buffer
    return True


def plan(targets: Sequence[ConcFactor], config: Optional[PlannerConfig] = None) -> Plan:
    """
    EMDP plan for a target series.

    order "series" walks the series as given, "descending" by CF, "best"
    runs both and keeps the cheaper plan (samples, then steps, then
    buffers; ties keep series order). When neither beats independent
    bit-serial preparation, "best" falls back to bit-serial chains that
    still recycle storage and serve duplicates.
    """
    config = config or PlannerConfig()
    targets = tuple(targets)
    for i, t in enumerate(targets):
        if t.prec > config.max_precision:
            raise PrecisionError(f"target {i} ({t}) exceeds precision {config.max_precision}")

    if config.order != "best":
        return _run(targets, config.order, config)

    plans = [_run(targets, "series", config), _run(targets, "descending", config)]
    chosen = min(plans, key=lambda p: execute(p).stats.cost("samples"))
    if dominates_naive(chosen, targets):
        return chosen

    fallback = _run(targets, "series", config, make=bit_serial_droplet)
    dbg("emdp.fallback", targets=[str(t) for t in targets], samples=execute(fallback).stats.n_sample)
    return fallback
