import pytest
from rich.padding import Padding
from rich.table import Table
from rich.text import Text

from workfringe.color import HighlighterPipeline
from workfringe.color.stages import VerdictHighlighter
from workfringe.core.oracle import OracleReport
from workfringe.table_render import (
    ColumnConfig,
    ReportRenderer,
    _is_rich_renderable,
    format_deviation,
    make_report_renderer,
)


# ---------- helpers ------------------------------------------------
class DummyRenderable(Text):
    """Rich-совместимый объект для _is_rich_renderable()."""


def reports() -> list[OracleReport]:
    return [
        OracleReport("crooks", 3.2e-13, 1e-9, "β=1.2 ω/Ω=1.5 N=7"),
        OracleReport("microreversibility", 0.25, 1e-10, "t=0.785398"),
    ]


# =================================================================
#                    Ф У Н К Ц И О Н А Л Ь Н Ы Е  Т Е С Т Ы
# =================================================================
# ---------- _is_rich_renderable -----------------------------------
def test_is_rich_renderable_detects_rich_objects():
    assert _is_rich_renderable(Text("hi")) is True
    assert _is_rich_renderable(DummyRenderable("ok")) is True
    assert _is_rich_renderable(1e-12) is False
    assert _is_rich_renderable("str") is False


# ---------- ColumnConfig.header_text ------------------------------
def test_column_header_text():
    assert ColumnConfig("check").header_text() == "check"
    assert ColumnConfig("check", header="Check").header_text() == "Check"


def test_format_deviation():
    assert format_deviation(0.0) == "0.000e+00"
    assert format_deviation(3.2e-13) == "3.200e-13"


# ---------- ReportRenderer._build_row ------------------------------
def test_build_row_pads_and_applies_processors():
    renderer = ReportRenderer(
        [ColumnConfig("check"), ColumnConfig("deviation", processor=format_deviation)]
    )
    row = renderer._build_row({"check": "crooks", "deviation": 1e-12})
    assert all(isinstance(cell, Padding) for cell in row)
    assert row[1].renderable == "1.000e-12"


def test_build_row_falls_back_to_repr():
    renderer = ReportRenderer([ColumnConfig("threshold")])
    (cell,) = renderer._build_row({"threshold": 1e-10})
    assert cell.renderable == repr(1e-10)


def test_build_row_raises_on_missing_field():
    renderer = ReportRenderer([ColumnConfig("nope")])
    with pytest.raises(KeyError):
        renderer.rich_render(reports())


# ---------- render -------------------------------------------------
def test_rich_render_has_one_row_per_report():
    table = make_report_renderer().rich_render(reports())
    assert isinstance(table, Table)
    assert table.row_count == 2
    assert [c.header for c in table.columns] == [
        "Check",
        "Max deviation",
        "Threshold",
        "Verdict",
        "Worst point",
    ]


def test_plain_render_lists_verdicts():
    out = make_report_renderer(table_width=100).render(reports(), color=False)
    assert "\x1b[" not in out
    assert "PASS" in out and "FAIL" in out
    assert "3.200e-13" in out
    assert "microreversibility" in out


def test_colored_render_styles_the_verdict():
    pipeline = HighlighterPipeline([VerdictHighlighter()])
    out = make_report_renderer(colorize_pipeline=pipeline, table_width=100).render(
        reports(), color=True
    )
    assert "\x1b[" in out
    assert "FAIL" in out
