# dilution_planner/utils.py
from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Optional

from .conc import ConcFactor, parse_cf
from .errors import CFParseError


def _now_iso_z() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def popcount(k: int) -> int:
    return bin(k).count("1")


def common_precision(cfs: Iterable[ConcFactor]) -> int:
    return max((cf.prec for cf in cfs), default=0)


def render_series(cfs: Iterable[ConcFactor]) -> list[str]:
    """
    CF strings over the series' common denominator, e.g. '14/16'.
    """
    items = list(cfs)
    d = common_precision(items)
    return [cf.over(d) for cf in items]


def parse_target_text(text: str, *, precision: Optional[int] = None) -> list[ConcFactor]:
    """
    Comma / whitespace separated CF list. Positions in errors are 1-based.
    """
    raw = (text or "").replace("\n", ",").replace(";", ",")
    parts = [p.strip() for p in raw.split(",")]
    parts = [p for chunk in parts for p in chunk.split()]
    if not parts:
        raise CFParseError("no targets given")
    return [parse_cf(p, precision=precision, position=i) for i, p in enumerate(parts, start=1)]


def parse_targets_arg(value: str, *, precision: Optional[int] = None) -> list[ConcFactor]:
    """
    --targets accepts a literal list or a path to a file holding one
    (JSON array of CF strings, or plain text with one CF per line).
    """
    value = (value or "").strip()
    if not value:
        raise CFParseError("no targets given")

    path = Path(value).expanduser()
    if path.is_file():
        body = path.read_text(encoding="utf-8")
        if path.suffix.lower() == ".json":
            data = load_json(path)
            items = data.get("targets") if isinstance(data, dict) else data
            if not isinstance(items, list):
                raise CFParseError("JSON target file must hold a list", text=str(path))
            return [parse_cf(str(x), precision=precision, position=i) for i, x in enumerate(items, start=1)]

        out: list[ConcFactor] = []
        for lineno, line in enumerate(body.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            out.append(parse_cf(line, precision=precision, position=lineno))
        if not out:
            raise CFParseError("no targets given", text=str(path))
        return out

    return parse_target_text(value, precision=precision)


def load_json(path: Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_json_atomic(path: Path, data: Any) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    tmp.replace(path)


def write_text_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)
