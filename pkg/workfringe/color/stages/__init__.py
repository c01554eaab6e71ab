"""
Built-in styling stages.

* :class:`VerdictHighlighter` - colour a line by its leading verdict word
  (``PASS`` / ``FAIL`` / ...).
"""

from .verdict import VerdictHighlighter

__all__: list[str] = ["VerdictHighlighter"]
