# dilution_planner/report/tables.py
from __future__ import annotations

from typing import Optional, Sequence

import pandas as pd
from rich.table import Table

from ..plan.orchestrator import ComparisonRow

COLUMNS = ["series", "algorithm", "n", "status", "S", "B", "W", "steps", "peak", "peak/n"]
PUBLISHED_COLUMNS = ["S (published)", "B (published)", "W (published)", "steps (published)"]
PUBLISHED = "published"


def _published(reference: Optional[dict], series: str, algorithm: str) -> dict[str, object]:
    empty: dict[str, object] = {c: None for c in PUBLISHED_COLUMNS}
    if not reference:
        return empty
    table = reference.get("table", {}).get(series)
    algorithms = [a.lower() for a in reference.get("algorithms", [])]
    if not table or algorithm.lower() not in algorithms:
        return empty
    i = algorithms.index(algorithm.lower())
    out = dict(empty)
    out.update(
        {
            "S (published)": table["sample"][i],
            "B (published)": table["buffer"][i],
            "W (published)": table["waste"][i],
        }
    )
    if algorithm.lower() == "emdp":
        out["steps (published)"] = reference.get("emdp", {}).get(series, {}).get("steps")
    return out


def _published_records(reference: dict, series: str, n_targets: int, computed: set[str]) -> list[dict]:
    """Rows for reference algorithms that were not recomputed, quoted figures only."""
    records = []
    for algorithm in reference.get("algorithms", []):
        if algorithm.lower() in computed:
            continue
        published = _published(reference, series, algorithm)
        if published["S (published)"] is None:
            continue
        rec: dict[str, object] = {c: None for c in COLUMNS}
        rec.update({"series": series, "algorithm": algorithm, "n": n_targets, "status": PUBLISHED})
        rec.update(published)
        records.append(rec)
    return records


def _record(r: ComparisonRow) -> dict[str, object]:
    return {
        "series": r.series,
        "algorithm": r.algorithm,
        "n": r.n_targets,
        "status": r.status,
        "S": r.n_sample,
        "B": r.n_buffer,
        "W": r.n_waste,
        "steps": r.n_steps,
        "peak": r.peak_storage,
        "peak/n": None if r.peak_ratio is None else round(r.peak_ratio, 3),
    }


def comparison_frame(rows: Sequence[ComparisonRow], *, reference: Optional[dict] = None) -> pd.DataFrame:
    """
    One row per (series, algorithm). With a reference, published columns
    are filled where it has the same series and algorithm, and each
    series is followed by quoted rows for the reference algorithms that
    were not recomputed (status "published").
    """
    by_series: dict[str, list[ComparisonRow]] = {}
    for r in rows:
        by_series.setdefault(r.series, []).append(r)

    records = []
    for series, group in by_series.items():
        for r in group:
            rec = _record(r)
            if reference is not None:
                rec.update(_published(reference, r.series, r.algorithm))
            records.append(rec)
        if reference is not None:
            computed = {r.algorithm.lower() for r in group}
            records.extend(_published_records(reference, series, group[0].n_targets, computed))

    columns = COLUMNS + (PUBLISHED_COLUMNS if reference is not None else [])
    df = pd.DataFrame.from_records(records, columns=columns)
    for col in ("S", "B", "W", "steps", "peak", *[c for c in PUBLISHED_COLUMNS if c in df.columns]):
        df[col] = df[col].astype("Int64")
    return df


def frame_to_csv(df: pd.DataFrame) -> str:
    return df.to_csv(index=False, lineterminator="\n")


def _cell(value: object) -> str:
    if value is None:
        return "-"
    try:
        if pd.isna(value):
            return "-"
    except (TypeError, ValueError):
        pass
    return str(value)


def frame_to_rich(df: pd.DataFrame, *, title: str = "") -> Table:
    table = Table(title=title or None, show_lines=False, header_style="bold")
    for col in df.columns:
        numeric = col not in ("series", "algorithm", "status")
        table.add_column(str(col), justify="right" if numeric else "left", style="dim" if "published" in col else None)
    for row in df.itertuples(index=False):
        table.add_row(*(_cell(v) for v in row))
    return table


def frame_to_text(df: pd.DataFrame) -> str:
    return df.to_string(index=False, na_rep="-") + "\n"


def reduction_lines(reduction: dict[str, Optional[float]], *, baseline: str = "naive") -> list[str]:
    out = []
    for label, value in reduction.items():
        if value is None:
            continue
        out.append(f"{label} reduction vs {baseline}: {value:.1%}")
    return out
