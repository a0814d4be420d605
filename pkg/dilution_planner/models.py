# dilution_planner/models.py
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .config import BUFFER_REF, SAMPLE_REF
from .conc import ONE, ZERO, ConcFactor


@dataclass(frozen=True)
class Source:
    """
    Where a droplet comes from.

    kind is "sample" | "buffer" | "step"; step/index only matter for "step"
    (index 0 is output a, 1 is output b).
    """
    kind: str
    step: int = 0
    index: int = 0

    @staticmethod
    def output(step: int, index: int) -> "Source":
        return Source("step", step, index)

    @property
    def is_dispenser(self) -> bool:
        return self.kind in ("sample", "buffer")

    @property
    def cf(self) -> Optional[ConcFactor]:
        """CF of a dispenser droplet; None for step outputs."""
        if self.kind == "sample":
            return ONE
        if self.kind == "buffer":
            return ZERO
        return None

    @property
    def ref(self) -> str:
        if self.kind == "sample":
            return SAMPLE_REF
        if self.kind == "buffer":
            return BUFFER_REF
        return f"{self.step}.{self.index}"


SAMPLE = Source("sample")
BUFFER = Source("buffer")


@dataclass(frozen=True)
class Disposition:
    kind: str  # "target" | "store" | "waste"
    index: Optional[int] = None

    @staticmethod
    def target(index: int) -> "Disposition":
        return Disposition("target", index)

    def __str__(self) -> str:
        return f"target[{self.index}]" if self.kind == "target" else self.kind


STORE = Disposition("store")
WASTE = Disposition("waste")


@dataclass(frozen=True)
class Droplet:
    """A unit droplet; volume is always one unit under 1:1 mixing."""
    cf: ConcFactor
    source: Source


@dataclass(frozen=True)
class PlanStep:
    id: int
    input_a: Source
    input_b: Source
    out_cf: ConcFactor
    disposition_a: Disposition = STORE
    disposition_b: Disposition = STORE

    @property
    def inputs(self) -> tuple[Source, Source]:
        return (self.input_a, self.input_b)

    @property
    def dispositions(self) -> tuple[Disposition, Disposition]:
        return (self.disposition_a, self.disposition_b)


@dataclass(frozen=True)
class Plan:
    targets: tuple[ConcFactor, ...]
    steps: tuple[PlanStep, ...] = ()
    direct_dispenses: tuple[tuple[int, Source], ...] = ()
    algorithm: str = ""


@dataclass(frozen=True)
class PlanStats:
    n_sample: int = 0
    n_buffer: int = 0
    n_waste: int = 0
    n_steps: int = 0
    peak_storage: int = 0

    def summary(self) -> str:
        return (
            f"S={self.n_sample} B={self.n_buffer} W={self.n_waste} "
            f"steps={self.n_steps} peak={self.peak_storage}"
        )

    def cost(self, objective: str = "samples") -> tuple[int, int, int]:
        if objective == "steps":
            return (self.n_steps, self.n_sample, self.n_buffer)
        return (self.n_sample, self.n_steps, self.n_buffer)


@dataclass
class StepDraft:
    """Mutable step used by planners while dispositions may still change."""
    id: int
    input_a: Source
    input_b: Source
    out_cf: ConcFactor
    dispositions: list[Disposition] = field(default_factory=lambda: [STORE, STORE])

    def freeze(self) -> PlanStep:
        return PlanStep(
            id=self.id,
            input_a=self.input_a,
            input_b=self.input_b,
            out_cf=self.out_cf,
            disposition_a=self.dispositions[0],
            disposition_b=self.dispositions[1],
        )
