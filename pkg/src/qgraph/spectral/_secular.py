"""
Assembly of the vertex-condition system of the free Laplacian.

On edge e of length L the solution is written in the scaled exponential basis

    f_e(x) = alpha_e * exp(i k x) + beta_e * exp(i k (L - x)),

so neither coefficient factor overflows for bounded Im k. With E = exp(i k L):

    value at x = 0:  (1, E)        outgoing derivative / (i k) at x = 0:  (1, -E)
    value at x = L:  (E, 1)        outgoing derivative / (i k) at x = L:  (-E, 1)

Derivative rows are divided by i k, which keeps the determinant entire in k.
A lead carries a_in * exp(-i k x) + a_out * exp(i k x): value a_in + a_out and
outgoing derivative / (i k) equal to a_out - a_in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from qgraph._errors import InvalidWavenumberError
from qgraph.graphs._models import Lead, MetricGraph, VertexCondition


def require_nonzero(k: complex) -> complex:
    k = complex(k)
    if k == 0:
        raise InvalidWavenumberError("k = 0 is excluded from the secular machinery (the basis degenerates)")
    if not (np.isfinite(k.real) and np.isfinite(k.imag)):
        raise InvalidWavenumberError(f"k must be finite, got {k!r}")
    return k


def end_factors(graph: MetricGraph, k: complex) -> tuple[np.ndarray, np.ndarray]:
    """
    Per-edge (value, derivative) coefficient pairs at both ends.

    Returns:
        Two arrays of shape (|E|, 2, 2): values[e, end] and derivatives[e, end],
        each a pair of coefficients multiplying (alpha_e, beta_e).
    """
    phase = np.exp(1j * k * graph.lengths)
    ones = np.ones_like(phase)
    values = np.stack([
        np.stack([ones, phase], axis=-1),
        np.stack([phase, ones], axis=-1),
    ], axis=1)
    derivatives = np.stack([
        np.stack([ones, -phase], axis=-1),
        np.stack([-phase, ones], axis=-1),
    ], axis=1)
    return values, derivatives


def assemble_vertex_system(
    graph: MetricGraph,
    k: complex,
    leads: tuple[Lead, ...] = (),
) -> tuple[np.ndarray, np.ndarray]:
    """
    Assemble all vertex-condition rows.

    Unknowns: (alpha_e, beta_e) for every edge in order, then a_out for every lead.
    Rows per vertex in declaration order: a Neumann vertex with d incidences gives
    d - 1 continuity rows and one weighted derivative-sum row, a Dirichlet vertex
    gives d value rows. Incidences are the edge ends (edge order) followed by the
    leads at that vertex (lead order).

    Returns:
        (A, C) with A x + C a_in = 0; A is square of size 2|E| + |L|, C is (2|E| + |L|) x |L|.
    """
    k = require_nonzero(k)
    n_edges = len(graph.edges)
    n_leads = len(leads)
    size = 2 * n_edges + n_leads
    values, derivatives = end_factors(graph, k)

    A = np.zeros((size, size), dtype=complex)
    C = np.zeros((size, max(n_leads, 0)), dtype=complex)
    leads_at: dict[str, list[int]] = {}
    for idx, lead in enumerate(leads):
        leads_at.setdefault(lead.vertex, []).append(idx)

    row = 0
    for vertex in graph.vertices:
        # (A-row coefficients, C-row coefficients) for value and derivative of each incidence
        value_rows: list[tuple[np.ndarray, np.ndarray]] = []
        derivative_rows: list[tuple[np.ndarray, np.ndarray]] = []

        for edge_idx, end in graph.incidences[vertex.id]:
            a_val = np.zeros(size, dtype=complex)
            a_der = np.zeros(size, dtype=complex)
            a_val[2 * edge_idx: 2 * edge_idx + 2] = values[edge_idx, end]
            a_der[2 * edge_idx: 2 * edge_idx + 2] = graph.edges[edge_idx].weight * derivatives[edge_idx, end]
            value_rows.append((a_val, np.zeros(n_leads, dtype=complex)))
            derivative_rows.append((a_der, np.zeros(n_leads, dtype=complex)))

        for lead_idx in leads_at.get(vertex.id, []):
            weight = leads[lead_idx].weight
            a_val = np.zeros(size, dtype=complex)
            c_val = np.zeros(n_leads, dtype=complex)
            a_val[2 * n_edges + lead_idx] = 1.0
            c_val[lead_idx] = 1.0
            a_der = np.zeros(size, dtype=complex)
            c_der = np.zeros(n_leads, dtype=complex)
            a_der[2 * n_edges + lead_idx] = weight
            c_der[lead_idx] = -weight
            value_rows.append((a_val, c_val))
            derivative_rows.append((a_der, c_der))

        if not value_rows:
            continue

        if vertex.condition is VertexCondition.DIRICHLET:
            for a_val, c_val in value_rows:
                A[row], C[row] = a_val, c_val
                row += 1
        else:
            ref_a, ref_c = value_rows[0]
            for a_val, c_val in value_rows[1:]:
                A[row], C[row] = a_val - ref_a, c_val - ref_c
                row += 1
            A[row] = sum(a for a, _ in derivative_rows)
            C[row] = sum(c for _, c in derivative_rows)
            row += 1

    assert row == size, f"🌀 Sanity check | assembled {row} rows for {size} unknowns."
    return A, C


def secular_scale(graph: MetricGraph) -> float:
    """
    Fixed reference for the singular values of the secular matrix.

    On the real axis every entry is a sum of unimodular phases, derivative rows
    times an edge weight, so the largest weight (at least 1) bounds their size
    for all k. sigma_max(k) is no reference: at the eigenvalues of a Neumann
    loop the whole matrix vanishes.
    """
    return max(1.0, max((edge.weight for edge in graph.edges), default=1.0))


@dataclass(frozen=True, eq=False)
class SecularSystem:
    """
    The homogeneous vertex-condition system of a compact graph at wavenumber k.

    Attributes:
        k: The (complex) wavenumber.
        matrix: Square matrix of size 2|E|; columns are (alpha_e, beta_e) per edge in order.
        edge_ids: Edge ids labelling the column pairs.
        scale: k-independent reference for the singular values, see `secular_scale`.
    """

    k: complex
    matrix: np.ndarray
    edge_ids: tuple[str, ...]
    scale: float = 1.0

    def __post_init__(self) -> None:
        n = 2 * len(self.edge_ids)
        assert self.matrix.shape == (n, n), \
            f"🌀 Sanity check | secular matrix must be {n}x{n}, got {self.matrix.shape}"

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    def singular_values(self) -> np.ndarray:
        """Singular values in decreasing order (empty for a graph without edges)."""
        if self.size == 0:
            return np.zeros(0)
        return np.asarray(scipy.linalg.svdvals(self.matrix))

    def scaled_singular_values(self) -> np.ndarray:
        return self.singular_values() / self.scale

    def scaled_sigma_min(self) -> float:
        """sigma_min / scale, the eigenvalue detection metric."""
        sigma = self.scaled_singular_values()
        return float(sigma[-1]) if sigma.size else 0.0


def assemble_secular(g: MetricGraph, k: complex) -> SecularSystem:
    """
    Assemble the secular system of a compact graph.

    Raises:
        InvalidWavenumberError: For k = 0.

    Example:
        >>> system = assemble_secular(interval, 3.14159)
        >>> system.matrix.shape
        (2, 2)
    """
    A, _ = assemble_vertex_system(g, k)
    return SecularSystem(k=complex(k), matrix=A, edge_ids=tuple(e.id for e in g.edges), scale=secular_scale(g))
