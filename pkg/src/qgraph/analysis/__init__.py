"""
Cross-graph verification: isospectrality, S-matrix conjugation, isopolarity,
eigenfunction transplantation and the symmetry-breaking experiment.
"""

from qgraph.analysis._compare import compare_poles, compare_spectra, conjugation_report, conjugation_residual
from qgraph.analysis._experiment import SymmetryBreakingResult, symmetry_breaking_experiment
from qgraph.analysis._formatters import JsonReportFormatter, ReportFormatter, TextReportFormatter
from qgraph.analysis._models import ComparisonItem, ComparisonKind, ComparisonReport, Transplantation
from qgraph.analysis._transplant import (
    BlockMap,
    TransplantedEigenfunction,
    block_transplantation,
    derive_block_map,
    lead_transplantation,
    transplant_eigenfunction,
    transplant_report,
)

__all__ = [
    # Models
    "Transplantation",
    "ComparisonKind",
    "ComparisonItem",
    "ComparisonReport",
    # Comparisons
    "compare_spectra",
    "compare_poles",
    "conjugation_residual",
    "conjugation_report",
    # Transplantation
    "lead_transplantation",
    "block_transplantation",
    "BlockMap",
    "derive_block_map",
    "TransplantedEigenfunction",
    "transplant_eigenfunction",
    "transplant_report",
    # Experiment
    "SymmetryBreakingResult",
    "symmetry_breaking_experiment",
    # Formatters
    "ReportFormatter",
    "JsonReportFormatter",
    "TextReportFormatter",
]
