"""
Isospectrality, isopolarity and S-matrix conjugation checks.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np
import scipy.linalg

from qgraph._config import QGRAPH
from qgraph._errors import AnalysisError
from qgraph._utils import map_in_order
from qgraph.analysis._models import ComparisonItem, ComparisonKind, ComparisonReport, Transplantation
from qgraph.graphs._io import graph_hash
from qgraph.graphs._models import ExtendedGraph, MetricGraph, as_extended
from qgraph.scattering._resonances import ResonanceSet
from qgraph.scattering._smatrix import smatrix
from qgraph.spectral._spectrum import Spectrum

logger = logging.getLogger(__name__)


def _log_report(name: str, report: ComparisonReport) -> None:
    icon = "✅" if report.passed else "❌"
    logger.info(
        f"{name[:26]:<26} | CMP  | {icon} {report.verdict}: {len(report.items)} items, "
        f"max deviation {report.max_deviation:.3e} (tol {report.tolerance:.1e})"
    )


# =============================================================================
# Spectra
# =============================================================================


def _pair_monotone(left: np.ndarray, right: np.ndarray, tol: float) -> list[ComparisonItem]:
    """Two-pointer pairing of sorted lists; entries without a partner within tol stay unpaired."""
    items: list[ComparisonItem] = []
    i = j = 0
    while i < len(left) or j < len(right):
        if i < len(left) and j < len(right) and abs(left[i] - right[j]) <= tol:
            items.append(ComparisonItem(f"{len(items) + 1}", complex(left[i]), complex(right[j]),
                                        float(abs(left[i] - right[j]))))
            i += 1
            j += 1
        elif j >= len(right) or (i < len(left) and left[i] < right[j]):
            items.append(ComparisonItem(f"{len(items) + 1}", complex(left[i]), None, math.inf))
            i += 1
        else:
            items.append(ComparisonItem(f"{len(items) + 1}", None, complex(right[j]), math.inf))
            j += 1
    return items


def compare_spectra(s1: Spectrum, s2: Spectrum, tol: float | None = None) -> ComparisonReport:
    """
    Compare two spectra computed on the same interval.

    Eigenvalues are listed with multiplicity and paired in increasing order. With
    equal counts the i-th eigenvalues are paired directly; otherwise entries without
    a partner within tol are reported unpaired (deviation +inf).

    Raises:
        AnalysisError: If the search intervals differ.

    Example:
        >>> compare_spectra(spectrum(q1, 0.1, 15), spectrum(q2, 0.1, 15)).passed
        True
    """
    if (s1.k_min, s1.k_max) != (s2.k_min, s2.k_max):
        raise AnalysisError(
            f"spectra computed on different intervals: ({s1.k_min}, {s1.k_max}) vs ({s2.k_min}, {s2.k_max})"
        )
    tolerance = QGRAPH.config.analysis.spectra_tol if tol is None else tol
    left, right = s1.ks(), s2.ks()
    if len(left) == len(right):
        items = [
            ComparisonItem(f"{i + 1}", complex(a), complex(b), float(abs(a - b)))
            for i, (a, b) in enumerate(zip(left, right, strict=True))
        ]
    else:
        items = _pair_monotone(left, right, tolerance)

    if s1.zero_mode_multiplicity or s2.zero_mode_multiplicity:
        same = s1.zero_mode_multiplicity == s2.zero_mode_multiplicity
        items.insert(0, ComparisonItem(
            "zero-mode", complex(s1.zero_mode_multiplicity), complex(s2.zero_mode_multiplicity),
            0.0 if same else math.inf,
        ))

    report = ComparisonReport(
        kind=ComparisonKind.SPECTRA,
        items=tuple(items),
        tolerance=tolerance,
        metadata={
            "graph_1": s1.graph_hash,
            "graph_2": s2.graph_hash,
            "interval": [s1.k_min, s1.k_max],
            "count_1": s1.count,
            "count_2": s2.count,
        },
        warnings=s1.warnings + s2.warnings,
    )
    _log_report("CompareSpectra", report)
    return report


# =============================================================================
# Poles
# =============================================================================


def _expand(rs: ResonanceSet) -> list[complex]:
    return [p.k for p in rs.poles for _ in range(p.multiplicity)]


def compare_poles(r1: ResonanceSet, r2: ResonanceSet, tol: float | None = None) -> ComparisonReport:
    """
    Compare two pole sets found in the same rectangle.

    Poles (with multiplicity) are matched greedily by increasing distance, each
    pole used at most once. Unmatched poles are reported with deviation +inf.

    Raises:
        AnalysisError: If the search rectangles differ.
    """
    if r1.rect != r2.rect:
        raise AnalysisError(f"pole sets found in different rectangles: {r1.rect.as_tuple()} vs {r2.rect.as_tuple()}")
    tolerance = QGRAPH.config.analysis.poles_tol if tol is None else tol
    left, right = _expand(r1), _expand(r2)

    pairs: list[tuple[int, int, float]] = []
    if left and right:
        distances = np.abs(np.subtract.outer(np.array(left), np.array(right)))
        used_left: set[int] = set()
        used_right: set[int] = set()
        for flat in np.argsort(distances, axis=None, kind="stable"):
            i, j = divmod(int(flat), len(right))
            if i in used_left or j in used_right:
                continue
            used_left.add(i)
            used_right.add(j)
            pairs.append((i, j, float(distances[i, j])))
            if len(pairs) == min(len(left), len(right)):
                break
    assert len({i for i, _, _ in pairs}) == len(pairs) == len({j for _, j, _ in pairs}), \
        "🌀 Sanity check | pole matching must be injective."

    matched_left = {i for i, _, _ in pairs}
    matched_right = {j for _, j, _ in pairs}
    items = [
        ComparisonItem(f"pair {n + 1}", left[i], right[j], d)
        for n, (i, j, d) in enumerate(sorted(pairs, key=lambda p: (left[p[0]].real, left[p[0]].imag)))
    ]
    items.extend(ComparisonItem("unmatched", left[i], None, math.inf)
                 for i in range(len(left)) if i not in matched_left)
    items.extend(ComparisonItem("unmatched", None, right[j], math.inf)
                 for j in range(len(right)) if j not in matched_right)

    report = ComparisonReport(
        kind=ComparisonKind.POLES,
        items=tuple(items),
        tolerance=tolerance,
        metadata={
            "graph_1": r1.graph_hash,
            "graph_2": r2.graph_hash,
            "rect": list(r1.rect.as_tuple()),
            "count_1": len(left),
            "count_2": len(right),
        },
        warnings=r1.warnings + r2.warnings,
    )
    if not report.passed:
        separations = sorted(d for _, _, d in pairs if d >= tolerance)
        if separations:
            logger.info(f"{'ComparePoles'[:26]:<26} | CMP  |   smallest separation above tolerance: "
                        f"{separations[0]:.3e}")
    _log_report("ComparePoles", report)
    return report


# =============================================================================
# S-matrix conjugation
# =============================================================================


def _as_transplantation(T: Transplantation | np.ndarray) -> Transplantation:
    return T if isinstance(T, Transplantation) else Transplantation(np.asarray(T))


def conjugation_residual(
    eg1: ExtendedGraph | MetricGraph,
    eg2: ExtendedGraph | MetricGraph,
    T: Transplantation | np.ndarray,
    k: complex,
) -> float:
    """
    max |T^-1 S2(k) T - S1(k)| over all entries.

    Raises:
        AnalysisError: If a lead count differs from the dimension of T.
        PoleProximityError: If k is (close to) a pole of either graph.

    Example:
        >>> conjugation_residual(q1_leads, q2_leads, BUILTIN_T, 1.3) < 1e-9
        True
    """
    first, second = as_extended(eg1), as_extended(eg2)
    transplantation = _as_transplantation(T)
    n = transplantation.dimension
    if len(first.leads) != n or len(second.leads) != n:
        raise AnalysisError(
            f"lead counts {len(first.leads)} and {len(second.leads)} do not match the transplantation dimension {n}"
        )
    if n == 0:
        return 0.0
    s1 = smatrix(first, k).S
    s2 = smatrix(second, k).S
    conjugated = scipy.linalg.solve(transplantation.T, s2 @ transplantation.T)
    return float(np.max(np.abs(conjugated - s1)))


def conjugation_report(
    eg1: ExtendedGraph | MetricGraph,
    eg2: ExtendedGraph | MetricGraph,
    T: Transplantation | np.ndarray,
    ks: Sequence[complex],
    tol: float | None = None,
    jobs: int | None = None,
) -> ComparisonReport:
    """
    Conjugation residuals over a k-grid, evaluated in parallel.

    Raises:
        AnalysisError: If a lead count differs from the dimension of T.
        PoleProximityError: If a grid point is (close to) a pole of either graph.
    """
    first, second = as_extended(eg1), as_extended(eg2)
    transplantation = _as_transplantation(T)
    cfg = QGRAPH.config
    tolerance = cfg.analysis.conjugation_tol if tol is None else tol
    grid = [complex(k) for k in ks]
    residuals = map_in_order(
        lambda k: conjugation_residual(first, second, transplantation, k),
        grid,
        max_workers=cfg.runtime.jobs if jobs is None else jobs,
    )
    items = tuple(
        ComparisonItem(f"k={k.real:.12g}{k.imag:+.12g}j", k, k, residual)
        for k, residual in zip(grid, residuals, strict=True)
    )
    report = ComparisonReport(
        kind=ComparisonKind.SMATRIX_CONJUGATION,
        items=items,
        tolerance=tolerance,
        metadata={
            "graph_1": graph_hash(first),
            "graph_2": graph_hash(second),
            "grid_size": len(grid),
            "transplantation": transplantation.to_dict(),
        },
    )
    _log_report("ConjugationReport", report)
    return report
