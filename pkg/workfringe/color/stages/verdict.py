"""
Verdict high-lighter
====================

Colours a whole line by its **first matching prefix**, e.g. ``PASS`` in green
and ``FAIL`` in red. Used for the verdict column of ``workfringe verify``.
"""

from __future__ import annotations

from typing import Mapping, Optional

from rich.style import Style
from rich.text import Text

from ..abstraction import LineHighlighter

DEFAULT_RULES: Mapping[str, str] = {
    "FAIL": "red",
    "PASS": "green",
    "SKIP": "yellow",
}


class VerdictHighlighter(LineHighlighter):
    """Colourise one line based on a prefix lookup.

    Parameters
    ----------
    bold :
        Add the *bold* attribute to matched lines.
    default_color :
        Colour of lines no rule matches; ``None`` leaves them unstyled.
    case_sensitive :
        Whether prefix matching is case-sensitive (default *False*).
    rules :
        Mapping ``prefix -> colour``; first match wins. Defaults to
        :data:`DEFAULT_RULES`.
    """

    def __init__(
        self,
        bold: bool = True,
        default_color: Optional[str] = None,
        case_sensitive: bool = False,
        rules: Mapping[str, str] | None = None,
    ) -> None:
        self.bold = bold
        self.default_color = default_color
        self.case_sensitive = case_sensitive
        self.rules: Mapping[str, str] = dict(DEFAULT_RULES if rules is None else rules)

    def colorize_line(self, line: Text) -> Text:
        probe = line.plain.lstrip()
        if not self.case_sensitive:
            probe = probe.lower()

        for prefix, color in self.rules.items():
            pref = prefix if self.case_sensitive else prefix.lower()
            if probe.startswith(pref):
                line.stylize(Style(color=color, bold=self.bold), 0, len(line))
                return line

        if self.default_color is not None:
            line.stylize(Style(color=self.default_color), 0, len(line))
        return line
