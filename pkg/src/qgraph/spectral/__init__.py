"""
Spectra of compact metric graphs.

The Laplacian eigenvalues k^2 of a compact graph are located as the real k > 0
where the secular (vertex-condition) matrix is rank deficient.

Example:
    >>> from qgraph.spectral import spectrum, eigenfunction
    >>> spec = spectrum(graph, 0.1, 10.0)
    >>> basis = eigenfunction(graph, spec.eigenvalues[0].k)
"""

from qgraph.spectral._eigenfunction import Eigenfunction, eigenfunction, vertex_condition_residual
from qgraph.spectral._secular import SecularSystem, assemble_secular, assemble_vertex_system, secular_scale
from qgraph.spectral._spectrum import (
    SpectralLine,
    Spectrum,
    SpectrumOptions,
    scaled_singular_values,
    spectrum,
)

__all__ = [
    # Secular system
    "SecularSystem",
    "assemble_secular",
    "assemble_vertex_system",
    "secular_scale",
    # Spectrum
    "SpectrumOptions",
    "SpectralLine",
    "Spectrum",
    "spectrum",
    "scaled_singular_values",
    # Eigenfunctions
    "Eigenfunction",
    "eigenfunction",
    "vertex_condition_residual",
]
