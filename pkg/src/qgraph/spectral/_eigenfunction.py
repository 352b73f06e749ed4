"""
Eigenfunctions of a compact metric graph.

The eigenspace at an eigenvalue k is the nullspace of the secular matrix. The
SVD nullspace is orthonormal in coefficient space; it is re-orthonormalized in
the weighted L2 inner product sum_e w_e * int_0^L f_e conj(g_e) dx, whose per-edge
Gram matrix in the scaled exponential basis is [[L, s], [s, L]] with s = sin(kL)/k.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from qgraph._config import QGRAPH
from qgraph._errors import InvalidWavenumberError, NotInSpectrumError
from qgraph.graphs._models import MetricGraph, VertexCondition
from qgraph.spectral._secular import assemble_secular, end_factors, require_nonzero

logger = logging.getLogger(__name__)

_AMPLITUDE_SAMPLES = 33


def edge_values(k: complex, length: float, coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """alpha * exp(ikx) + beta * exp(ik(L - x)) at the points x."""
    x = np.asarray(x, dtype=float)
    return coeffs[0] * np.exp(1j * k * x) + coeffs[1] * np.exp(1j * k * (length - x))


def edge_derivatives(k: complex, length: float, coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """d/dx of edge_values."""
    x = np.asarray(x, dtype=float)
    return 1j * k * (coeffs[0] * np.exp(1j * k * x) - coeffs[1] * np.exp(1j * k * (length - x)))


def max_amplitude(graph: MetricGraph, k: complex, coeffs: np.ndarray, samples: int = _AMPLITUDE_SAMPLES) -> float:
    """Largest |f| over a uniform sample of every edge (endpoints included)."""
    amplitude = 0.0
    for idx, edge in enumerate(graph.edges):
        x = np.linspace(0.0, edge.length, samples)
        amplitude = max(amplitude, float(np.max(np.abs(edge_values(k, edge.length, coeffs[idx], x)))))
    return amplitude


def vertex_condition_residual(graph: MetricGraph, k: complex, coeffs: np.ndarray) -> float:
    """
    Largest vertex-condition defect relative to the function's max amplitude.

    Defects are continuity differences and weighted derivative sums (divided by k)
    at Neumann vertices, and values at Dirichlet vertices.

    Args:
        graph: The compact graph.
        k: Wavenumber.
        coeffs: Array of shape (|E|, 2) with (alpha_e, beta_e) per edge.
    """
    coeffs = np.asarray(coeffs, dtype=complex).reshape(len(graph.edges), 2)
    values, derivatives = end_factors(graph, k)
    defect = 0.0
    for vertex in graph.vertices:
        ends = graph.incidences[vertex.id]
        if not ends:
            continue
        vals = np.array([values[e, end] @ coeffs[e] for e, end in ends])
        if vertex.condition is VertexCondition.DIRICHLET:
            defect = max(defect, float(np.max(np.abs(vals))))
            continue
        defect = max(defect, float(np.max(np.abs(vals - vals[0]))))
        current = sum(graph.edges[e].weight * (derivatives[e, end] @ coeffs[e]) for e, end in ends)
        defect = max(defect, float(abs(current)))

    amplitude = max_amplitude(graph, k, coeffs)
    if amplitude == 0.0:
        return 0.0 if defect == 0.0 else float("inf")
    return defect / amplitude


def gram_matrix(graph: MetricGraph, k: float) -> np.ndarray:
    """Weighted L2 Gram matrix of the coefficient vector (block diagonal, 2x2 per edge)."""
    n = len(graph.edges)
    gram = np.zeros((2 * n, 2 * n), dtype=float)
    for idx, edge in enumerate(graph.edges):
        s = np.sin(k * edge.length) / k
        gram[2 * idx: 2 * idx + 2, 2 * idx: 2 * idx + 2] = edge.weight * np.array([[edge.length, s], [s, edge.length]])
    return gram


@dataclass(frozen=True, eq=False)
class Eigenfunction:
    """
    A normalized eigenfunction of a compact graph.

    Attributes:
        graph: The graph the coefficients refer to.
        k: The eigenvalue (wavenumber).
        coefficients: Array of shape (|E|, 2), (alpha_e, beta_e) per edge in edge order.
        residual: Vertex-condition defect relative to the max amplitude.
    """

    graph: MetricGraph
    k: float
    coefficients: np.ndarray
    residual: float

    def __post_init__(self) -> None:
        assert self.coefficients.shape == (len(self.graph.edges), 2), \
            f"🌀 Sanity check | coefficients must have shape ({len(self.graph.edges)}, 2)."

    def edge_coefficients(self, edge_id: str) -> np.ndarray:
        return self.coefficients[self.graph.edge_index[edge_id]]

    def evaluate(self, edge_id: str, x: float | np.ndarray) -> np.ndarray:
        """Values on an edge at coordinates x in [0, L_e] (measured from the edge start)."""
        edge = self.graph.edge(edge_id)
        return edge_values(self.k, edge.length, self.edge_coefficients(edge_id), np.asarray(x))

    def derivative(self, edge_id: str, x: float | np.ndarray) -> np.ndarray:
        edge = self.graph.edge(edge_id)
        return edge_derivatives(self.k, edge.length, self.edge_coefficients(edge_id), np.asarray(x))

    def vertex_value(self, vertex_id: str) -> complex:
        """Value at a vertex (taken from its first incident edge end; 0 for isolated vertices)."""
        ends = self.graph.incidences[vertex_id]
        if not ends:
            return 0j
        edge_idx, end = ends[0]
        edge = self.graph.edges[edge_idx]
        return complex(self.evaluate(edge.id, 0.0 if end == 0 else edge.length))

    def norm(self) -> float:
        """Weighted L2 norm."""
        c = self.coefficients.reshape(-1)
        return float(np.sqrt(np.real(np.conj(c) @ gram_matrix(self.graph, self.k) @ c)))

    def inner(self, other: Eigenfunction) -> complex:
        """Weighted L2 inner product <self, other> (linear in `other`)."""
        c1 = self.coefficients.reshape(-1)
        c2 = other.coefficients.reshape(-1)
        return complex(np.conj(c1) @ gram_matrix(self.graph, self.k) @ c2)


def _fix_phase(graph: MetricGraph, k: float, coeffs: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the sampled value of largest modulus is real positive."""
    best = 0j
    for idx, edge in enumerate(graph.edges):
        x = np.linspace(0.0, edge.length, _AMPLITUDE_SAMPLES)
        vals = edge_values(k, edge.length, coeffs[idx], x)
        candidate = vals[int(np.argmax(np.abs(vals)))]
        if abs(candidate) > abs(best) * (1 + 1e-9):
            best = candidate
    return coeffs if best == 0 else coeffs * (abs(best) / best)


def eigenfunction(g: MetricGraph, k: float, rank_tol: float | None = None) -> list[Eigenfunction]:
    """
    Orthonormal basis of the eigenspace at k.

    Args:
        g: The compact graph.
        k: A positive eigenvalue, e.g. taken from spectrum().
        rank_tol: Threshold on scaled singular values (default QGRAPH.config.spectral.rank_tol).

    Returns:
        Eigenfunctions orthonormal in the weighted L2 inner product, one per
        singular value below the threshold.

    Raises:
        InvalidWavenumberError: If k is not a positive real number.
        NotInSpectrumError: If no singular value is below the threshold.

    Example:
        >>> [f] = eigenfunction(interval, math.pi)
        >>> abs(f.evaluate("e", 0.0)) < 1e-12
        True
    """
    k_value = require_nonzero(k)
    if k_value.imag != 0 or k_value.real <= 0:
        raise InvalidWavenumberError(f"eigenfunctions are defined for real k > 0, got {k!r}")
    k_real = k_value.real
    tol = rank_tol if rank_tol is not None else QGRAPH.config.spectral.rank_tol

    system = assemble_secular(g, k_real)
    if system.size == 0:
        raise NotInSpectrumError(f"k = {k_real:.12g} is not in spectrum: the graph has no edges")

    _, sigma, vh = scipy.linalg.svd(system.matrix)
    scaled = sigma / system.scale
    null_mask = scaled < tol
    if not np.any(null_mask):
        raise NotInSpectrumError(
            f"k = {k_real:.12g} is not in spectrum (scaled sigma_min = {scaled[-1]:.3e} >= {tol:.1e})"
        )

    null_basis = np.conj(vh[null_mask]).T
    gram = gram_matrix(g, k_real)
    overlap = np.conj(null_basis.T) @ gram @ null_basis
    eigvals, eigvecs = scipy.linalg.eigh(overlap)
    basis = null_basis @ eigvecs / np.sqrt(eigvals)

    functions = []
    for column in basis.T:
        coeffs = _fix_phase(g, k_real, column.reshape(len(g.edges), 2))
        residual = vertex_condition_residual(g, k_real, coeffs)
        functions.append(Eigenfunction(graph=g, k=k_real, coefficients=coeffs, residual=residual))

    logger.debug(
        f"{'Eigenfunction'[:26]:<26} | SPEC | 🔎 k={k_real:.12g} multiplicity={len(functions)} "
        f"max residual={max(f.residual for f in functions):.2e}"
    )
    return functions
