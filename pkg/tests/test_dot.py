# tests/test_dot.py
from __future__ import annotations

import re

from dilution_planner.conc import ConcFactor
from dilution_planner.models import BUFFER, SAMPLE, Disposition, Plan, PlanStep
from dilution_planner.report.dot import plan_to_dot
from dilution_planner.storage.plan_files import load_witness


def node_ids(dot: str) -> list[str]:
    return re.findall(r'^\t"([^"]+)" \[', dot, flags=re.M)


def test_witness_graph():
    dot = plan_to_dot(load_witness())
    ids = node_ids(dot)
    assert len([i for i in ids if re.fullmatch(r"M\d+", i)]) == 8
    assert [i for i in ids if i.startswith("D")] == ["D3"]
    assert dot.startswith('digraph "plan" {') and dot.endswith("}\n")


def test_witness_graph_is_byte_stable():
    assert plan_to_dot(load_witness()) == plan_to_dot(load_witness())


def test_empty_plan_is_header_only():
    dot = plan_to_dot(Plan(targets=()))
    assert node_ids(dot) == []
    assert "->" not in dot


def test_single_mix():
    half = ConcFactor(1, 1)
    plan = Plan(
        targets=(half,),
        steps=(PlanStep(1, SAMPLE, BUFFER, half, Disposition.target(0), Disposition("waste")),),
    )
    dot = plan_to_dot(plan)
    assert node_ids(dot) == ["S1", "B2", "M1", "O1.0", "O1.1"]
    assert dot.count("->") == 4
    assert "doublecircle" in dot and "dashed" in dot
    assert '"1/2\\nT0"' in dot
