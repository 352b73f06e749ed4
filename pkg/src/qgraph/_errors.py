"""
Exception hierarchy of the qgraph library.

All errors derive from QGraphError. Input problems additionally derive from
ValueError, numerical failures from RuntimeError, so callers (and the CLI exit
codes) can dispatch on either family.
"""

from __future__ import annotations

from qgraph._retry import RetryableError


class QGraphError(Exception):
    """Base class of every qgraph error."""


# =============================================================================
# Input errors
# =============================================================================


class GraphValidationError(QGraphError, ValueError):
    """A graph violates one of its structural invariants."""


class GraphParseError(QGraphError, ValueError):
    """
    A graph or symmetry file could not be parsed.

    Attributes:
        path: The offending file (None for in-memory documents).
        location: Human-readable position, e.g. "line 3, column 7" or "edges[2].length".
    """

    def __init__(self, message: str, path: str | None = None, location: str | None = None):
        self.path = path
        self.location = location
        where = ", ".join(part for part in (path, location) if part)
        super().__init__(f"{where}: {message}" if where else message)


class InvalidWavenumberError(QGraphError, ValueError):
    """The wavenumber is outside the domain of the requested operation (e.g. k = 0)."""


class SymmetryError(QGraphError, ValueError):
    """Base class of group, representation and action errors."""


class GroupValidationError(SymmetryError):
    """A multiplication table does not define a group, or a subset is not a subgroup."""


class RepresentationError(SymmetryError):
    """A one-dimensional representation is not a +-1 valued homomorphism."""


class ActionError(SymmetryError):
    """A group does not act on a graph by symmetries."""


class SymmetryBreakingLeadsError(SymmetryError):
    """The leads of an extended graph do not form whole orbits of the acting subgroup."""


class QuotientError(SymmetryError):
    """The quotient of a graph by a representation is not expressible with Neumann/Dirichlet conditions."""


class AnalysisError(QGraphError, ValueError):
    """Cross-graph comparison inputs are incompatible (intervals, rectangles, dimensions, block maps)."""


# =============================================================================
# Numerical errors
# =============================================================================


class NumericalError(QGraphError, RuntimeError):
    """Base class of numerical failures."""


class NotInSpectrumError(NumericalError):
    """The wavenumber is not an eigenvalue at the configured rank tolerance."""


class PoleProximityError(NumericalError):
    """The extended system is singular at the requested complex wavenumber."""


class ContourError(NumericalError, RetryableError):
    """An argument-principle contour passes too close to a zero; retried with a perturbed contour."""


class ResonanceSearchError(NumericalError):
    """The resonance search failed after exhausting its contour perturbations."""
