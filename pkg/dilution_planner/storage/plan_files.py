# dilution_planner/storage/plan_files.py
from __future__ import annotations

from pathlib import Path
from typing import Any, Optional

from ..config import (
    BUFFER_REF,
    DATA_DIR,
    PLAN_FORMAT_VERSION,
    REFERENCE_JSON_NAME,
    SAMPLE_REF,
    SERIES_JSON_NAME,
    WITNESS_JSON_NAME,
)
from ..conc import ConcFactor, parse_cf
from ..errors import CFParseError, PlanFormatError
from ..execute import ConservationVerdict, ExecutionTrace
from ..models import BUFFER, SAMPLE, Disposition, Plan, PlanStats, PlanStep, Source
from ..utils import _now_iso_z, load_json, write_json_atomic

_DISPOSITION_KINDS = ("store", "waste", "target")


# -----------------------------
# Render
# -----------------------------

def _disposition_doc(d: Disposition) -> dict:
    if d.kind == "target":
        return {"kind": "target", "index": d.index}
    return {"kind": d.kind}


def plan_to_document(plan: Plan, *, stats: Optional[PlanStats] = None) -> dict:
    """
    JSON-ready plan document. CFs are canonical 'k/2^d' strings, inputs
    are 'sample', 'buffer' or '<step>.<output>'.
    """
    doc: dict[str, Any] = {
        "format_version": PLAN_FORMAT_VERSION,
        "algorithm": plan.algorithm,
        "targets": [str(t) for t in plan.targets],
        "steps": [
            {
                "id": s.id,
                "inputs": [s.input_a.ref, s.input_b.ref],
                "out": str(s.out_cf),
                "dispositions": [_disposition_doc(d) for d in s.dispositions],
            }
            for s in plan.steps
        ],
        "direct_dispenses": [{"index": i, "source": src.ref} for i, src in plan.direct_dispenses],
    }
    if stats is not None:
        doc["stats"] = _stats_doc(stats)
        doc["generated_at"] = _now_iso_z()
    return doc


def _stats_doc(stats: PlanStats) -> dict:
    return {
        "samples": stats.n_sample,
        "buffers": stats.n_buffer,
        "waste": stats.n_waste,
        "steps": stats.n_steps,
        "peak_storage": stats.peak_storage,
    }


def trace_to_document(trace: ExecutionTrace, verdict: ConservationVerdict) -> dict:
    """Replay of a plan: per-step records, storage snapshots, stats, violations, conservation."""
    return {
        "format_version": PLAN_FORMAT_VERSION,
        "valid": trace.ok and verdict.ok,
        "algorithm": trace.plan.algorithm,
        "targets": [str(t) for t in trace.plan.targets],
        "records": [
            {
                "step": r.step_id,
                "inputs": [None if c is None else str(c) for c in r.input_cfs],
                "out": str(r.out_cf),
                "occupancy": r.occupancy,
                "snapshot": r.snapshot_id,
            }
            for r in trace.records
        ],
        "snapshots": [list(s) for s in trace.snapshots],
        "stats": _stats_doc(trace.stats),
        "violations": [{"kind": v.kind, "step": v.step, "message": v.message} for v in trace.violations],
        "conservation": {
            "ok": verdict.ok,
            "droplets_in": verdict.droplets_in,
            "droplets_out": verdict.droplets_out,
            "sample_mass_in": str(verdict.sample_mass_in),
            "sample_mass_out": str(verdict.sample_mass_out),
            "message": verdict.message,
        },
    }


# -----------------------------
# Parse
# -----------------------------

def _cf(value: Any, where: str) -> ConcFactor:
    try:
        return parse_cf(str(value))
    except CFParseError as e:
        raise PlanFormatError(f"{where}: {e}") from e


def _source(value: Any, where: str) -> Source:
    ref = str(value).strip()
    if ref == SAMPLE_REF:
        return SAMPLE
    if ref == BUFFER_REF:
        return BUFFER
    step, sep, idx = ref.partition(".")
    if not sep or not step.isdigit() or idx not in ("0", "1"):
        raise PlanFormatError(f"{where}: bad input reference {ref!r}")
    return Source.output(int(step), int(idx))


def _disposition(value: Any, where: str) -> Disposition:
    if not isinstance(value, dict) or value.get("kind") not in _DISPOSITION_KINDS:
        raise PlanFormatError(f"{where}: bad disposition {value!r}")
    if value["kind"] == "target":
        index = value.get("index")
        if not isinstance(index, int) or isinstance(index, bool):
            raise PlanFormatError(f"{where}: target disposition needs an integer index")
        return Disposition.target(index)
    return Disposition(value["kind"])


def _pair(value: Any, where: str) -> list:
    if not isinstance(value, list) or len(value) != 2:
        raise PlanFormatError(f"{where}: expected a list of two entries")
    return value


def document_to_plan(doc: Any) -> Plan:
    """Inverse of plan_to_document. Structural problems raise PlanFormatError."""
    if not isinstance(doc, dict):
        raise PlanFormatError("plan document must be a JSON object")

    version = doc.get("format_version")
    if version != PLAN_FORMAT_VERSION:
        raise PlanFormatError(f"unsupported format_version {version!r}")

    raw_targets = doc.get("targets")
    if not isinstance(raw_targets, list):
        raise PlanFormatError("targets must be a list")
    targets = tuple(_cf(t, f"targets[{i}]") for i, t in enumerate(raw_targets))

    steps: list[PlanStep] = []
    for n, raw in enumerate(doc.get("steps") or []):
        where = f"steps[{n}]"
        if not isinstance(raw, dict):
            raise PlanFormatError(f"{where}: step must be an object")
        sid = raw.get("id")
        if not isinstance(sid, int) or isinstance(sid, bool):
            raise PlanFormatError(f"{where}: id must be an integer")
        ins = _pair(raw.get("inputs"), where)
        disps = _pair(raw.get("dispositions"), where)
        steps.append(
            PlanStep(
                id=sid,
                input_a=_source(ins[0], where),
                input_b=_source(ins[1], where),
                out_cf=_cf(raw.get("out"), where),
                disposition_a=_disposition(disps[0], where),
                disposition_b=_disposition(disps[1], where),
            )
        )

    direct: list[tuple[int, Source]] = []
    for n, raw in enumerate(doc.get("direct_dispenses") or []):
        where = f"direct_dispenses[{n}]"
        if not isinstance(raw, dict) or not isinstance(raw.get("index"), int):
            raise PlanFormatError(f"{where}: needs an integer index")
        direct.append((raw["index"], _source(raw.get("source"), where)))

    return Plan(
        targets=targets,
        steps=tuple(steps),
        direct_dispenses=tuple(direct),
        algorithm=str(doc.get("algorithm") or ""),
    )


# -----------------------------
# Files
# -----------------------------

def write_plan(path: Path, plan: Plan, *, stats: Optional[PlanStats] = None) -> None:
    write_json_atomic(Path(path), plan_to_document(plan, stats=stats))


def read_plan(path: Path) -> Plan:
    try:
        doc = load_json(Path(path))
    except ValueError as e:
        raise PlanFormatError(f"{path}: not valid JSON ({e})") from e
    return document_to_plan(doc)


# -----------------------------
# Shipped fixtures
# -----------------------------

def load_series_fixtures(data_dir: Path = DATA_DIR) -> dict[str, list[ConcFactor]]:
    """Named benchmark series, in published order."""
    data = load_json(data_dir / SERIES_JSON_NAME)
    return {
        name: [parse_cf(v, position=i) for i, v in enumerate(entry["targets"], start=1)]
        for name, entry in data["series"].items()
    }


def load_witness(data_dir: Path = DATA_DIR) -> Plan:
    return read_plan(data_dir / WITNESS_JSON_NAME)


def load_reference(data_dir: Path = DATA_DIR) -> dict:
    """Published per-series figures keyed by series then algorithm."""
    return load_json(data_dir / REFERENCE_JSON_NAME)
