"""
Rich-native styling pipeline
============================

:class:`HighlighterPipeline` feeds lines of a verification report through a
chain of :class:`~workfringe.color.abstraction.LineHighlighter` stages. An
empty pipeline is the ``--no-color`` mode: text passes through unstyled.

>>> pipeline = HighlighterPipeline([VerdictHighlighter()])
>>> pipeline.colorize("PASS  jarzynski")   # doctest: +SKIP
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable

from rich.console import Console
from rich.text import Text

if TYPE_CHECKING:  # pragma: no cover
    from .abstraction import LineHighlighter


class HighlighterPipeline:
    """Ordered chain of stages; reusable across reports.

    Parameters
    ----------
    stages :
        :class:`LineHighlighter` instances, applied in order to every line.
        A stage with a bulk ``colorize_lines`` gets all lines at once.
    """

    def __init__(self, stages: Iterable["LineHighlighter"]):
        self.stages: list["LineHighlighter"] = list(stages)

    @property
    def enabled(self) -> bool:
        return bool(self.stages)

    # ------------------------------------------------------------------
    # Public helpers
    # ------------------------------------------------------------------
    def colorize(self, text: str) -> Text:
        """One :class:`Text` with every stage applied, lines joined by ``\\n``."""
        rich_lines = [Text(line) for line in text.splitlines()]

        for stage in self.stages:
            colorize_lines = getattr(stage, "colorize_lines", None)
            if callable(colorize_lines):
                colorize_lines(rich_lines)
            else:
                for rl in rich_lines:
                    stage.colorize_line(rl)
        return Text("\n").join(rich_lines)

    def colorize_and_render(self, text: str, width: int | None = None) -> str:
        """Colourise and render to an ANSI string (plain text when no stage is set)."""
        rich_lines = self.colorize(text)
        console = Console(
            force_terminal=self.enabled,
            no_color=not self.enabled,
            color_system="truecolor" if self.enabled else None,
            width=width,
            legacy_windows=False,
        )
        with console.capture() as cap:
            console.print(rich_lines, end="")
        return cap.get()
