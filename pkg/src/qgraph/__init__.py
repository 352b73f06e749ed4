"""
Quantum graphs: spectra, scattering matrices, resonances and isospectral quotients.

Quick Start (spectrum):
    >>> from qgraph import Edge, MetricGraph, Vertex, VertexCondition, spectrum
    >>> interval = MetricGraph(
    ...     vertices=(Vertex("a", VertexCondition.DIRICHLET), Vertex("b", VertexCondition.DIRICHLET)),
    ...     edges=(Edge("e", "a", "b", 1.0),),
    ... )
    >>> spectrum(interval, 0.1, 10).ks()
    array([3.14159265, 6.28318531, 9.42477796])

Quick Start (isoscattering pair):
    >>> from qgraph import builtin_d4_example, quotient, conjugation_residual
    >>> parent, action, r1, r2, T = builtin_d4_example()
    >>> q1, q2 = quotient(parent, action, r1), quotient(parent, action, r2)
    >>> conjugation_residual(q1.quotient, q2.quotient, T, 2.0 - 0.3j) < 1e-8
    True

Global Configuration:
    >>> from qgraph import QGRAPH
    >>> QGRAPH.configure(spectral={"k_tol": 1e-12}, runtime={"jobs": 4})

Main Modules:
    - graphs: MetricGraph, ExtendedGraph and graph description files.
    - spectral: Eigenvalues and eigenfunctions of compact graphs.
    - scattering: Scattering matrices and resonances of graphs with leads.
    - symmetry: Finite groups, graph actions and quotients by +-1 representations.
    - analysis: Isospectrality, conjugation and isopolarity checks.

Errors:
    - QGraphError: Base class. Input errors also derive from ValueError,
      numerical failures from RuntimeError.
"""

from importlib.metadata import version as _get_version

__version__ = _get_version("qgraph")

from qgraph._config import (
    QGRAPH,
    AnalysisConfig,
    ConfigEntry,
    ConfigEnvVarError,
    ConfigValidationError,
    LibraryConfig,
    QGRAPHConfig,
    RuntimeConfig,
    ScatteringConfig,
    SpectralConfig,
)
from qgraph._errors import (
    ActionError,
    AnalysisError,
    ContourError,
    GraphParseError,
    GraphValidationError,
    GroupValidationError,
    InvalidWavenumberError,
    NotInSpectrumError,
    NumericalError,
    PoleProximityError,
    QGraphError,
    QuotientError,
    RepresentationError,
    ResonanceSearchError,
    SymmetryBreakingLeadsError,
    SymmetryError,
)
from qgraph._retry import MaxRetriesExceededError, RetryableError, Retrying
from qgraph.analysis import (
    BlockMap,
    ComparisonKind,
    ComparisonReport,
    JsonReportFormatter,
    TextReportFormatter,
    Transplantation,
    compare_poles,
    compare_spectra,
    conjugation_report,
    conjugation_residual,
    derive_block_map,
    lead_transplantation,
    symmetry_breaking_experiment,
    transplant_eigenfunction,
)
from qgraph.graphs import (
    Edge,
    ExtendedGraph,
    Lead,
    MetricGraph,
    Vertex,
    VertexCondition,
    attach_leads,
    load_graph,
    serialize_graph,
)
from qgraph.scattering import Rectangle, ResonanceSet, ScatteringMatrix, resonances, smatrix
from qgraph.spectral import Eigenfunction, Spectrum, eigenfunction, spectrum
from qgraph.symmetry import (
    FiniteGroup,
    GraphAction,
    QuotientResult,
    Rep1D,
    builtin_d4_example,
    induction_equivalent,
    load_symmetry,
    quotient,
    verify_action,
)

__all__ = [
    "__version__",
    # Configuration
    "QGRAPH",
    "QGRAPHConfig",
    "LibraryConfig",
    "SpectralConfig",
    "ScatteringConfig",
    "AnalysisConfig",
    "RuntimeConfig",
    "ConfigEntry",
    "ConfigEnvVarError",
    "ConfigValidationError",
    # Errors
    "QGraphError",
    "GraphValidationError",
    "GraphParseError",
    "InvalidWavenumberError",
    "SymmetryError",
    "GroupValidationError",
    "RepresentationError",
    "ActionError",
    "SymmetryBreakingLeadsError",
    "QuotientError",
    "AnalysisError",
    "NumericalError",
    "NotInSpectrumError",
    "PoleProximityError",
    "ContourError",
    "ResonanceSearchError",
    # Retry
    "Retrying",
    "RetryableError",
    "MaxRetriesExceededError",
    # Graphs
    "VertexCondition",
    "Vertex",
    "Edge",
    "Lead",
    "MetricGraph",
    "ExtendedGraph",
    "attach_leads",
    "load_graph",
    "serialize_graph",
    # Spectral
    "Spectrum",
    "spectrum",
    "Eigenfunction",
    "eigenfunction",
    # Scattering
    "ScatteringMatrix",
    "smatrix",
    "Rectangle",
    "ResonanceSet",
    "resonances",
    # Symmetry
    "FiniteGroup",
    "Rep1D",
    "GraphAction",
    "QuotientResult",
    "verify_action",
    "induction_equivalent",
    "quotient",
    "load_symmetry",
    "builtin_d4_example",
    # Analysis
    "Transplantation",
    "ComparisonKind",
    "ComparisonReport",
    "compare_spectra",
    "compare_poles",
    "conjugation_residual",
    "conjugation_report",
    "lead_transplantation",
    "BlockMap",
    "derive_block_map",
    "transplant_eigenfunction",
    "symmetry_breaking_experiment",
    "JsonReportFormatter",
    "TextReportFormatter",
]
