"""Rich table of oracle reports for ``workfringe verify``.

Each column is described by a :class:`ColumnConfig`; an optional processor
turns the raw value into text or any Rich renderable (the verdict column is
coloured through a :class:`~workfringe.color.HighlighterPipeline`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable, Literal, Mapping, Sequence, Union, cast

from rich import box
from rich.console import Console, RenderableType
from rich.padding import Padding
from rich.table import Table

from .color import HighlighterPipeline
from .core import OracleReport

StrOrRenderable = Union[str, RenderableType]
Processor = Callable[[Any], StrOrRenderable]

_Justify = Literal["default", "left", "center", "right", "full"]


def _is_rich_renderable(obj: Any) -> bool:
    return hasattr(obj, "__rich_console__") or hasattr(obj, "__rich_measure__")


def format_deviation(value: float) -> str:
    return f"{value:.3e}"


@dataclass(slots=True)
class ColumnConfig:
    name: str
    header: str | None = None
    ratio: float | None = None
    justify: str = "left"
    no_wrap: bool = False
    processor: Processor | None = None

    def header_text(self) -> str:
        return self.header or self.name


class ReportRenderer:
    """Build a table with one row per :class:`OracleReport`."""

    def __init__(
        self,
        columns: Sequence[ColumnConfig],
        *,
        box_style: box.Box = box.SQUARE_DOUBLE_HEAD,
        header_style: str = "bold",
        table_width: int | None = None,
    ) -> None:
        self.columns = list(columns)
        self.box_style = box_style
        self.header_style = header_style
        self.table_width = table_width

    # ------------------------------------------------------------------
    # Public API
    # ------------------------------------------------------------------

    def rich_render(self, reports: Iterable[OracleReport]) -> Table:
        table = Table(
            show_header=True,
            header_style=self.header_style,
            box=self.box_style,
            padding=(0, 0),
            expand=self.table_width is not None,
            width=self.table_width,
        )
        for col in self.columns:
            table.add_column(
                col.header_text(),
                justify=cast(_Justify, col.justify),
                ratio=None if col.ratio is None else int(col.ratio),
                no_wrap=col.no_wrap,
                overflow="fold",
            )
        for report in reports:
            table.add_row(*self._build_row(self._fields(report)))
        return table

    def render(self, reports: Iterable[OracleReport], color: bool = True) -> str:
        """Render to a string; ANSI codes only when *color* is set."""
        console = Console(
            force_terminal=color,
            no_color=not color,
            color_system="truecolor" if color else None,
            width=self.table_width or 120,
            legacy_windows=False,
        )
        with console.capture() as cap:
            console.print(self.rich_render(reports), end="")
        return cap.get()

    # ------------------------------------------------------------------
    # Internals
    # ------------------------------------------------------------------

    @staticmethod
    def _fields(report: OracleReport) -> Mapping[str, Any]:
        return {
            "check": report.name,
            "deviation": report.deviation,
            "threshold": report.threshold,
            "verdict": "PASS" if report.passed else "FAIL",
            "context": report.context,
        }

    def _build_row(self, fields: Mapping[str, Any]) -> list[RenderableType]:
        row: list[RenderableType] = []
        for col in self.columns:
            if col.name not in fields:
                raise KeyError(f"Report has no field '{col.name}'")
            raw = fields[col.name]
            value = raw if col.processor is None else col.processor(raw)
            if not (_is_rich_renderable(value) or isinstance(value, str)):
                value = repr(value)
            row.append(Padding(value, (0, 1)))
        return row


# ---------------------------------------------------------------------------
# Convenience factory
# ---------------------------------------------------------------------------


def make_report_renderer(
    *,
    colorize_pipeline: HighlighterPipeline | None = None,
    table_width: int | None = None,
) -> ReportRenderer:
    pipeline = colorize_pipeline or HighlighterPipeline([])
    columns = [
        ColumnConfig("check", header="Check", ratio=2),
        ColumnConfig(
            "deviation",
            header="Max deviation",
            justify="right",
            processor=lambda v: format_deviation(float(v)),
        ),
        ColumnConfig(
            "threshold",
            header="Threshold",
            justify="right",
            processor=lambda v: format_deviation(float(v)),
        ),
        ColumnConfig("verdict", header="Verdict", justify="center", processor=pipeline.colorize),
        ColumnConfig("context", header="Worst point", ratio=3),
    ]
    return ReportRenderer(columns, table_width=table_width)
