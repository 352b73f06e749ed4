"""
Scattering on extended graphs: S(k), unitarity and resonances.

Convention: exp(ikx) is outgoing on every lead, so resonances lie in Im k < 0.

Example:
    >>> from qgraph.scattering import smatrix, resonances, Rectangle
    >>> sm = smatrix(eg, 1.7)
    >>> found = resonances(eg, Rectangle(0.5, 7.0, -2.0, -0.01))
"""

from qgraph.scattering._extended import LogDeterminant, assemble_extended, log_determinant
from qgraph.scattering._resonances import (
    Pole,
    Rectangle,
    ResonanceOptions,
    ResonanceSet,
    count_zeros,
    resonances,
)
from qgraph.scattering._smatrix import ScatteringMatrix, eigenphases, smatrix, unitarity_defect

__all__ = [
    # Extended system
    "assemble_extended",
    "LogDeterminant",
    "log_determinant",
    # Scattering matrix
    "ScatteringMatrix",
    "smatrix",
    "unitarity_defect",
    "eigenphases",
    # Resonances
    "Rectangle",
    "Pole",
    "ResonanceOptions",
    "ResonanceSet",
    "count_zeros",
    "resonances",
]
