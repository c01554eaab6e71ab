import pytest
from rich.style import Style
from rich.text import Span, Text

from workfringe.color import HighlighterPipeline
from workfringe.color.stages import VerdictHighlighter


def _first_span(line: Text) -> tuple[Span, Style]:
    """Первый Span строки и его Style."""
    assert line.spans, "Text должен быть стилизован хотя бы один раз"
    span = line.spans[0]
    return span, span.style


# ==================================================================
#                     П Р Е Ф И К С Н Ы Е  П Р А В И Л А
# ==================================================================
@pytest.mark.parametrize(
    "raw, expected_color",
    [
        ("PASS", "green"),
        ("FAIL", "red"),
        ("  skip  continuous", "yellow"),  # ведущие пробелы и регистр игнорируются
    ],
)
def test_default_rules(raw, expected_color):
    hl = VerdictHighlighter()
    line = Text(raw)
    ret = hl.colorize_line(line)

    assert ret is line
    span, style = _first_span(line)
    assert style.color.name == expected_color
    assert style.bold is True
    assert (span.start, span.end) == (0, len(raw))


def test_custom_rules_first_match_wins():
    hl = VerdictHighlighter(rules={"PASSED": "blue", "PASS": "magenta"})
    line = Text("PASSED")
    hl.colorize_line(line)

    _, style = _first_span(line)
    assert style.color.name == "blue"


def test_case_sensitive_toggle():
    hl = VerdictHighlighter(case_sensitive=True)

    ok = Text("FAIL")
    hl.colorize_line(ok)
    assert _first_span(ok)[1].color.name == "red"

    ko = Text("fail")
    hl.colorize_line(ko)
    assert ko.spans == []


# ------------------------------------------------------------------
# Строки без совпадений
# ------------------------------------------------------------------
def test_unmatched_line_stays_plain_by_default():
    line = Text("jarzynski")
    VerdictHighlighter().colorize_line(line)
    assert line.spans == []


def test_unmatched_line_gets_default_color_without_bold():
    line = Text("jarzynski")
    VerdictHighlighter(default_color="cyan").colorize_line(line)
    _, style = _first_span(line)
    assert style.color.name == "cyan"
    assert not style.bold


def test_bold_can_be_disabled():
    line = Text("PASS")
    VerdictHighlighter(bold=False).colorize_line(line)
    assert not _first_span(line)[1].bold


# ==================================================================
#                             К О Н В Е Й Е Р
# ==================================================================
def test_pipeline_colorizes_each_line():
    pipeline = HighlighterPipeline([VerdictHighlighter()])
    text = pipeline.colorize("PASS\nFAIL")

    assert text.plain == "PASS\nFAIL"
    colors = [span.style.color.name for span in text.spans]
    assert colors == ["green", "red"]


def test_empty_pipeline_is_plain():
    pipeline = HighlighterPipeline([])
    assert not pipeline.enabled
    assert pipeline.colorize("FAIL").spans == []
    assert pipeline.colorize_and_render("FAIL") == "FAIL"


def test_enabled_pipeline_renders_ansi():
    rendered = HighlighterPipeline([VerdictHighlighter()]).colorize_and_render("FAIL")
    assert "\x1b[" in rendered
    assert "FAIL" in rendered
