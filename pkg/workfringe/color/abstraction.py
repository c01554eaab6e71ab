"""
Contract of one styling stage
=============================

A :class:`LineHighlighter` receives :class:`rich.text.Text` lines and adds
style spans to them **in place**. It never changes the plain text, so a
styled report and its ``--no-color`` twin carry the same characters.
"""

from typing import List, Protocol, Sequence

from rich.text import Text


class LineHighlighter(Protocol):
    """Protocol for single-line stages; :meth:`colorize_lines` is optional."""

    def colorize_line(self, line: Text) -> Text:
        """Style *line* in place and return the same object."""
        raise NotImplementedError("LineHighlighter.colorize_line must be overridden")

    def colorize_lines(self, lines: Sequence[Text]) -> List[Text]:
        return [self.colorize_line(t) for t in lines]
