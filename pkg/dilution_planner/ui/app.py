# dilution_planner/ui/app.py
from __future__ import annotations

import asyncio
from typing import Any, Optional, Sequence

from textual.app import App, ComposeResult
from textual.binding import Binding
from textual.containers import Container, Horizontal
from textual.reactive import reactive
from textual.widgets import DataTable, Footer, Header, Static

from ..conc import ConcFactor
from ..plan.orchestrator import ComparisonRow, compare_series, max_peak_ratio, reduction_vs
from ..plan.policy import PlannerConfig, SearchCaps


class StatCard(Static):
    def __init__(self, label: str, icon: str = ""):
        super().__init__()
        self.label = label
        self.icon = icon
        self.value = "-"

    def update_value(self, v: str) -> None:
        self.value = v
        self.update(f"{self.icon} {self.label}\n[b]{v}[/b]")


def _n(v: Optional[int]) -> str:
    return "-" if v is None else str(v)


class Details(Static):
    can_focus = True

    def show_row(self, row: Optional[ComparisonRow]) -> None:
        if row is None:
            self.update("Select a row…")
            return

        lines = [
            f"[b]{row.series}[/b] · {row.algorithm} · {row.status}",
            "",
            f"S={_n(row.n_sample)} B={_n(row.n_buffer)} W={_n(row.n_waste)} "
            f"steps={_n(row.n_steps)} peak={_n(row.peak_storage)}",
            "",
        ]

        plan = row.plan
        if plan is None:
            lines.append("No plan.")
        else:
            lines.append("[b]Targets:[/b] " + ", ".join(str(t) for t in plan.targets))
            lines.append("")
            lines.append("[b]Steps:[/b]")
            for s in plan.steps:
                disps = " / ".join(str(d) for d in s.dispositions)
                lines.append(f"{s.id:>3}. {s.input_a.ref} + {s.input_b.ref} → {s.out_cf}  [{disps}]")
            for index, src in plan.direct_dispenses:
                lines.append(f"  ·  {src.ref} → target[{index}]")

        self.update("\n".join(lines))
        self.scroll_home()


class ComparisonApp(App):
    CSS = """
    Screen { background: #101417; color: #e8eef2; }

    #stats_row { height: 4; margin: 1 1 1 1; }

    StatCard {
        width: 1fr;
        border: tall #2d3a45;
        padding: 0 2;
        background: #0b0f12;
    }

    #left_pane { width: 1fr; margin-right: 1; }

    #top_details {
        height: 4;
        border: tall #2d3a45;
        padding: 0 1;
        margin-bottom: 1;
        background: #0b0f12;
    }

    #list_box { height: 1fr; border: tall #2d3a45; }

    #details_box {
        width: 1fr;
        border: tall #2d3a45;
        padding: 0 1;
        background: #0b0f12;
    }

    #side_details { height: 100%; overflow-y: auto; }

    DataTable { height: 100%; }
    """

    BINDINGS = [
        Binding("q", "quit", "Quit"),
        Binding("r", "refresh", "Rerun"),
        Binding("a", "filter_all", "All"),
        Binding("e", "filter_emdp", "EMDP"),
        Binding("n", "filter_naive", "Naive"),
        Binding("o", "filter_oracle", "Oracle"),
        Binding("s", "toggle_sort", "Sort"),
        Binding("enter", "focus_details", "Details"),
        Binding("escape", "focus_list", "List"),
    ]

    filter_mode = reactive("all")
    sort_mode = reactive("series")

    def __init__(
        self,
        named_series: Sequence[tuple[str, Sequence[ConcFactor]]],
        *,
        algorithms: Sequence[str] = ("emdp", "naive"),
        config: Optional[PlannerConfig] = None,
        caps: Optional[SearchCaps] = None,
    ):
        super().__init__()
        self.named_series = list(named_series)
        self.algorithms = tuple(algorithms)
        self.config = config
        self.caps = caps

        self.rows: list[ComparisonRow] = []
        self.row_lookup: dict[str, ComparisonRow] = {}

    def compose(self) -> ComposeResult:
        yield Header(show_clock=True)

        with Horizontal(id="stats_row"):
            self.card_series = StatCard("Series", "🧪")
            self.card_samples = StatCard("Sample saving", "💧")
            self.card_waste = StatCard("Waste saving", "🗑")
            self.card_peak = StatCard("Max peak/n", "📦")
            self.card_invalid = StatCard("Invalid", "⚠️")
            yield self.card_series
            yield self.card_samples
            yield self.card_waste
            yield self.card_peak
            yield self.card_invalid

        with Horizontal():
            with Container(id="left_pane"):
                self.top_details = Details("Ready.", id="top_details")
                yield self.top_details
                self.table = DataTable(zebra_stripes=True, id="list_box")
                yield self.table

            with Container(id="details_box"):
                self.side_details = Details("Select a row…", id="side_details")
                yield self.side_details

        yield Footer()

    def on_mount(self) -> None:
        for label in ("Series", "Algorithm", "S", "B", "W", "Steps", "Peak"):
            self.table.add_column(label)
        self.table.cursor_type = "row"
        self.table.focus()
        self.call_after_refresh(self.start_compare)

    def apply_view(self) -> None:
        self.table.clear()
        self.row_lookup.clear()

        rows = list(self.rows)
        if self.filter_mode != "all":
            rows = [r for r in rows if r.algorithm == self.filter_mode]

        if self.sort_mode == "samples":
            rows.sort(key=lambda r: (r.n_sample is None, r.n_sample or 0, r.series))

        for i, row in enumerate(rows):
            key = f"{row.series}/{row.algorithm}/{i}"
            self.row_lookup[key] = row
            self.table.add_row(
                row.series,
                row.algorithm,
                _n(row.n_sample),
                _n(row.n_buffer),
                _n(row.n_waste),
                _n(row.n_steps),
                _n(row.peak_storage),
                key=key,
            )

        if self.table.row_count:
            self.table.cursor_coordinate = (0, 0)

        reduction = reduction_vs(self.rows)
        peak = max_peak_ratio(self.rows)
        self.card_series.update_value(str(len(self.named_series)))
        self.card_samples.update_value("-" if reduction["samples"] is None else f"{reduction['samples']:.0%}")
        self.card_waste.update_value("-" if reduction["waste"] is None else f"{reduction['waste']:.0%}")
        self.card_peak.update_value("-" if peak is None else f"{peak:.2f}")
        self.card_invalid.update_value(str(sum(1 for r in self.rows if r.status == "invalid")))

    # Actions
    def action_focus_details(self) -> None:
        self.side_details.focus()

    def action_focus_list(self) -> None:
        self.table.focus()

    async def action_refresh(self) -> None:
        self.start_compare()

    def start_compare(self) -> None:
        self.run_worker(self._compare_worker(), exclusive=True)

    async def _compare_worker(self) -> None:
        loop = asyncio.get_running_loop()
        self.top_details.update("[b]Planning…[/b]")

        def progress_cb(i: int, n: int, msg: str) -> None:
            pct = int((i / n) * 100) if n else 0
            self.call_from_thread(self.top_details.update, f"[b]Planning…[/b] {pct}%\n{msg}")

        def _do() -> list[ComparisonRow]:
            return compare_series(
                self.named_series,
                algorithms=self.algorithms,
                config=self.config,
                caps=self.caps,
                progress_cb=progress_cb,
            )

        self.rows = await loop.run_in_executor(None, _do)
        self.apply_view()
        self.top_details.update(f"✅ {len(self.rows)} plans compared.")

    def action_filter_all(self) -> None:
        self.filter_mode = "all"
        self.apply_view()

    def action_filter_emdp(self) -> None:
        self.filter_mode = "emdp"
        self.apply_view()

    def action_filter_naive(self) -> None:
        self.filter_mode = "naive"
        self.apply_view()

    def action_filter_oracle(self) -> None:
        self.filter_mode = "oracle"
        self.apply_view()

    def action_toggle_sort(self) -> None:
        self.sort_mode = "samples" if self.sort_mode == "series" else "series"
        self.apply_view()

    def on_data_table_row_highlighted(self, event: Any) -> None:
        key = event.row_key.value if event.row_key else ""
        self.side_details.show_row(self.row_lookup.get(key))
