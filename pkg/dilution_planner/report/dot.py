# dilution_planner/report/dot.py
from __future__ import annotations

from ..models import Plan, Source

_STYLE = {
    "sample": 'shape=invtriangle, style=filled, fillcolor="#f4cccc"',
    "buffer": 'shape=invtriangle, style=filled, fillcolor="#cfe2f3"',
    "mix": 'shape=circle, style=filled, fillcolor="#eeeeee"',
    "target": 'shape=doublecircle, style=filled, fillcolor="#d9ead3"',
    "store": "shape=box",
    "waste": 'shape=box, style="filled,dashed", fillcolor="#dddddd"',
}


def _q(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def plan_to_dot(plan: Plan, *, name: str = "plan") -> str:
    """
    Graphviz text for a plan: one node per dispenser use, one per mix step
    (M<id>), one per step output. Output is deterministic for a given plan.

    Render with: dot -Tpng plan.dot -o plan.png
    """
    lines: list[str] = [f"digraph {_q(name)} {{", "\trankdir=TB;", '\tnode [fontname="Helvetica"];']

    uses = 0

    def input_node(src: Source) -> str:
        nonlocal uses
        if src.is_dispenser:
            uses += 1
            node = f"{src.kind[0].upper()}{uses}"
            lines.append(f"\t{_q(node)} [label={_q(src.kind)}, {_STYLE[src.kind]}];")
            return node
        return f"O{src.step}.{src.index}"

    for step in plan.steps:
        mix_node = f"M{step.id}"
        a = input_node(step.input_a)
        b = input_node(step.input_b)
        lines.append(f"\t{_q(mix_node)} [label={_q(f'M{step.id}')}, {_STYLE['mix']}];")
        lines.append(f"\t{_q(a)} -> {_q(mix_node)};")
        lines.append(f"\t{_q(b)} -> {_q(mix_node)};")
        for idx, disp in enumerate(step.dispositions):
            out = f"O{step.id}.{idx}"
            label = str(step.out_cf)
            if disp.kind == "target":
                label += f"\\nT{disp.index}"
            style = _STYLE.get(disp.kind, _STYLE["store"])
            lines.append(f"\t{_q(out)} [label={_q(label)}, {style}];")
            lines.append(f"\t{_q(mix_node)} -> {_q(out)};")

    for index, src in plan.direct_dispenses:
        a = input_node(src)
        node = f"D{index}"
        cf = src.cf
        label = f"{cf}\\nT{index}" if cf is not None else f"T{index}"
        lines.append(f"\t{_q(node)} [label={_q(label)}, {_STYLE['target']}];")
        lines.append(f"\t{_q(a)} -> {_q(node)};")

    lines.append("}")
    return "\n".join(lines) + "\n"
