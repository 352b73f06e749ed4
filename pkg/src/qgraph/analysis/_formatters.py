"""
Report formatters.

Formatters turn a ComparisonReport into text: JSON for machines, aligned columns
for humans. Implement ReportFormatter for other layouts.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import override

from qgraph._utils import comment_block, render_json
from qgraph.analysis._models import ComparisonItem, ComparisonReport


class ReportFormatter(ABC):
    """
    Abstract base class for report formatters.

    Example:
        >>> class VerdictOnly(ReportFormatter):
        ...     def format(self, report, header=()):
        ...         return report.verdict + "\\n"
    """

    @abstractmethod
    def format(self, report: ComparisonReport, header: tuple[str, ...] = ()) -> str:
        """
        Render a report.

        Args:
            report: The report.
            header: Manifest lines written first as '#' comments.
        """
        pass


class JsonReportFormatter(ReportFormatter):
    """Indented JSON (non-finite deviations as strings)."""

    @override
    def format(self, report: ComparisonReport, header: tuple[str, ...] = ()) -> str:
        return render_json(report.to_dict(), header)


class TextReportFormatter(ReportFormatter):
    """
    Aligned-column listing with a verdict line.

    Attributes:
        max_items: Items listed before the listing is cut short (failures are always listed).
    """

    def __init__(self, max_items: int = 50):
        self.max_items = max_items

    @staticmethod
    def _value(value: complex | None) -> str:
        if value is None:
            return "-"
        if value.imag == 0:
            return f"{value.real:.12g}"
        return f"{value.real:.12g}{value.imag:+.12g}j"

    @staticmethod
    def _deviation(item: ComparisonItem) -> str:
        return "unpaired" if math.isinf(item.deviation) else f"{item.deviation:.3e}"

    @override
    def format(self, report: ComparisonReport, header: tuple[str, ...] = ()) -> str:
        failures = set(map(id, report.failures()))
        shown = [item for n, item in enumerate(report.items) if n < self.max_items or id(item) in failures]
        rows = [(item.label, self._value(item.left), self._value(item.right), self._deviation(item)) for item in shown]
        titles = ("item", "first", "second", "deviation")
        widths = [max([len(t)] + [len(r[c]) for r in rows]) for c, t in enumerate(titles)]

        lines = [
            f"{report.verdict}: {report.kind} comparison, {len(report.items)} items, "
            f"max deviation {report.max_deviation:.3e} (tolerance {report.tolerance:.1e})",
            "",
            "  ".join(t.ljust(w) for t, w in zip(titles, widths, strict=True)).rstrip(),
        ]
        lines.extend("  ".join(v.ljust(w) for v, w in zip(row, widths, strict=True)).rstrip() for row in rows)
        if len(shown) < len(report.items):
            lines.append(f"... {len(report.items) - len(shown)} more items within tolerance")
        lines.extend(f"warning: {w}" for w in report.warnings)
        return comment_block(header) + "\n".join(lines) + "\n"
