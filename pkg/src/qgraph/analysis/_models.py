"""
Data models for cross-graph comparisons.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from qgraph._errors import AnalysisError, GraphParseError
from qgraph._utils import read_text_file, render_csv, save_text_file, strip_comment_lines

# Above this condition number T counts as singular
_MAX_CONDITION = 1e12


# =============================================================================
# Transplantation
# =============================================================================


@dataclass(frozen=True, eq=False)
class Transplantation:
    """
    An invertible linear map between the lead spaces (or block spaces) of two graphs.

    Attributes:
        T: Square complex matrix.

    Example:
        >>> t = Transplantation(np.array([[1.0, 1.0], [1.0, -1.0]]))
        >>> t.dimension, round(t.condition, 12)
        (2, 1.0)
    """

    T: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.asarray(self.T, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise AnalysisError(f"transplantation must be a square matrix, got shape {matrix.shape}")
        object.__setattr__(self, "T", matrix)
        if matrix.size and not self.condition < _MAX_CONDITION:
            raise AnalysisError(f"transplantation is not invertible (condition number {self.condition:.3g})")

    @property
    def dimension(self) -> int:
        return self.T.shape[0]

    @property
    def condition(self) -> float:
        """2-norm condition number."""
        if not self.T.size:
            return 1.0
        return float(np.linalg.cond(self.T))

    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.T)

    def is_proportional_to(self, other: np.ndarray, tol: float = 1e-9) -> bool:
        """True if T = c * other for some nonzero scalar c."""
        other = np.asarray(other, dtype=complex)
        if other.shape != self.T.shape:
            return False
        pivot = int(np.argmax(np.abs(other)))
        if abs(other.flat[pivot]) == 0.0:
            return False
        scale = self.T.flat[pivot] / other.flat[pivot]
        if scale == 0:
            return False
        return float(np.max(np.abs(self.T - scale * other))) <= tol * float(np.max(np.abs(self.T)))

    def to_dict(self) -> dict[str, Any]:
        real = bool(np.all(self.T.imag == 0))
        rows = [[float(v.real) if real else [float(v.real), float(v.imag)] for v in row] for row in self.T]
        return {"matrix": rows, "condition": self.condition}

    @classmethod
    def identity(cls, n: int) -> Transplantation:
        return cls(np.eye(n))

    @classmethod
    def from_dict(cls, data: Any, source: str | None = None) -> Transplantation:
        """
        Build from {"matrix": [[...], ...]}; complex entries are [re, im] pairs.

        Raises:
            GraphParseError: Malformed document.
            AnalysisError: Non-square or singular matrix.
        """
        if not isinstance(data, dict) or not isinstance(data.get("matrix"), list):
            raise GraphParseError("expected an object with a 'matrix' list", path=source, location="document")
        rows = []
        for i, row in enumerate(data["matrix"]):
            if not isinstance(row, list):
                raise GraphParseError("expected a list", path=source, location=f"matrix[{i}]")
            values = []
            for j, entry in enumerate(row):
                if isinstance(entry, list) and len(entry) == 2 and all(_is_number(x) for x in entry):
                    values.append(complex(entry[0], entry[1]))
                elif _is_number(entry):
                    values.append(complex(entry))
                else:
                    raise GraphParseError("expected a number or a [re, im] pair", path=source,
                                          location=f"matrix[{i}][{j}]")
            rows.append(values)
        if len({len(row) for row in rows}) > 1:
            raise GraphParseError("rows of unequal length", path=source, location="matrix")
        return cls(np.array(rows, dtype=complex).reshape(len(rows), len(rows[0]) if rows else 0))

    @classmethod
    def load(cls, path: str | Path) -> Transplantation:
        """
        Load a transplantation file (JSON, optionally preceded by '#' comment lines).

        Raises:
            GraphParseError: Unreadable or malformed file.
            AnalysisError: Non-square or singular matrix.
        """
        file_path = Path(path)
        body, skipped = strip_comment_lines(read_text_file(file_path))
        try:
            data = json.loads(body)
        except json.JSONDecodeError as e:
            raise GraphParseError(e.msg, path=str(file_path),
                                  location=f"line {e.lineno + skipped}, column {e.colno}") from e
        return cls.from_dict(data, source=str(file_path))


def _is_number(value: Any) -> bool:
    return isinstance(value, int | float) and not isinstance(value, bool)


# =============================================================================
# Comparison reports
# =============================================================================


class ComparisonKind(enum.StrEnum):
    SPECTRA = "spectra"
    SMATRIX_CONJUGATION = "smatrix-conjugation"
    POLES = "poles"
    TRANSPLANT = "transplant"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ComparisonItem:
    """
    One compared pair.

    Attributes:
        label: What was compared (an eigenvalue index, a k value, a pole pair).
        left: Value on the first graph (None if unpaired).
        right: Value on the second graph (None if unpaired).
        deviation: Distance between the two; infinite for unpaired entries.
    """
    label: str
    left: complex | None
    right: complex | None
    deviation: float

    @property
    def paired(self) -> bool:
        return self.left is not None and self.right is not None


@dataclass(frozen=True)
class ComparisonReport:
    """
    Outcome of a cross-graph comparison.

    Attributes:
        kind: What was compared.
        items: Every compared pair, including unpaired entries.
        tolerance: The pass threshold.
        metadata: Graph hashes, intervals, rectangles, grids.
        warnings: Diagnostics collected along the way.

    Example:
        >>> report.passed, report.max_deviation < report.tolerance
        (True, True)
    """

    kind: ComparisonKind
    items: tuple[ComparisonItem, ...]
    tolerance: float
    metadata: dict[str, Any] = field(default_factory=dict)
    warnings: tuple[str, ...] = field(default=())

    @property
    def max_deviation(self) -> float:
        return max((item.deviation for item in self.items), default=0.0)

    @property
    def min_deviation(self) -> float:
        return min((item.deviation for item in self.items), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tolerance

    @property
    def unpaired(self) -> tuple[ComparisonItem, ...]:
        return tuple(item for item in self.items if not item.paired)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def failures(self) -> tuple[ComparisonItem, ...]:
        return tuple(item for item in self.items if not item.deviation < self.tolerance)

    def to_dict(self) -> dict[str, Any]:
        def encode(value: complex | None) -> Any:
            if value is None:
                return None
            return float(value.real) if value.imag == 0 else [float(value.real), float(value.imag)]

        return {
            "kind": str(self.kind),
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "max_deviation": _finite_or_str(self.max_deviation),
            "count": len(self.items),
            "unpaired": len(self.unpaired),
            "metadata": self.metadata,
            "warnings": list(self.warnings),
            "items": [
                {"label": item.label, "left": encode(item.left), "right": encode(item.right),
                 "deviation": _finite_or_str(item.deviation)}
                for item in self.items
            ],
        }

    def render_pairs_csv(self, header: tuple[str, ...] = ()) -> str:
        """Pair listing as CSV (label, left_re, left_im, right_re, right_im, deviation); blanks for unpaired sides."""
        def parts(value: complex | None) -> tuple[Any, Any]:
            return ("", "") if value is None else (float(value.real), float(value.imag))

        rows = [(item.label, *parts(item.left), *parts(item.right), float(item.deviation)) for item in self.items]
        return render_csv(("label", "left_re", "left_im", "right_re", "right_im", "deviation"), rows, header)

    def write_pairs_csv(self, path: str | Path, header: tuple[str, ...] = ()) -> None:
        save_text_file(self.render_pairs_csv(header), Path(path))


def _finite_or_str(value: float) -> float | str:
    return value if math.isfinite(value) else str(value)
