"""
Vertex-condition system of an extended graph and its determinant.

Unknowns are the edge coefficients (alpha_e, beta_e) followed by the outgoing
lead amplitudes; incoming amplitudes enter through the right-hand side:

    A(k) x = B(k) a_in,    x = (alpha_1, beta_1, ..., alpha_E, beta_E, a_out).

With a_in = 0 the system is the outgoing-only (resonance) problem; det A(k) is
entire in k and its zeros in Im k < 0 are the resonances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from qgraph.graphs._models import ExtendedGraph, MetricGraph, as_extended
from qgraph.spectral._secular import assemble_vertex_system


def assemble_extended(eg: ExtendedGraph | MetricGraph, k: complex) -> tuple[np.ndarray, np.ndarray]:
    """
    Assemble the extended system A x = B a_in.

    Returns:
        A of size (2|E| + |L|) squared and B of size (2|E| + |L|) x |L|.

    Raises:
        InvalidWavenumberError: For k = 0.

    Example:
        >>> A, B = assemble_extended(two_lead_edge, 1.0)
        >>> A.shape, B.shape
        ((4, 4), (4, 2))
    """
    eg = as_extended(eg)
    A, C = assemble_vertex_system(eg.graph, k, eg.leads)
    return A, -C


@dataclass(frozen=True)
class LogDeterminant:
    """
    det A as log-modulus and unwrapped-per-factor phase.

    Attributes:
        log_abs: log|det A| (-inf for an exactly singular matrix).
        phase: Sum of the pivot arguments plus pi per row interchange (not reduced mod 2 pi).
    """
    log_abs: float
    phase: float

    @property
    def value(self) -> complex:
        """det A itself; may overflow or underflow for large systems."""
        if self.log_abs == -math.inf:
            return 0j
        return complex(np.exp(self.log_abs + 1j * self.phase))

    def ratio(self, other: LogDeterminant) -> complex:
        """det(self) / det(other) without forming either determinant."""
        return complex(np.exp((self.log_abs - other.log_abs) + 1j * (self.phase - other.phase)))


def log_determinant(A: np.ndarray) -> LogDeterminant:
    """
    log|det A| and arg det A via LU factorization with partial pivoting.

    Example:
        >>> ld = log_determinant(np.diag([2.0, -3.0]))
        >>> round(math.exp(ld.log_abs), 12), round(ld.phase / math.pi, 12)
        (6.0, 1.0)
    """
    if A.shape[0] == 0:
        return LogDeterminant(log_abs=0.0, phase=0.0)
    lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    diagonal = np.diag(lu)
    modulus = np.abs(diagonal)
    if np.any(modulus == 0):
        return LogDeterminant(log_abs=-math.inf, phase=0.0)
    swaps = int(np.count_nonzero(piv != np.arange(len(piv))))
    return LogDeterminant(
        log_abs=float(np.sum(np.log(modulus))),
        phase=float(np.sum(np.angle(diagonal)) + math.pi * swaps),
    )


def extended_log_determinant(eg: ExtendedGraph | MetricGraph, k: complex) -> LogDeterminant:
    A, _ = assemble_extended(eg, k)
    return log_determinant(A)


def relative_sigma_min(A: np.ndarray) -> float:
    """sigma_min / sigma_max of a square matrix (0 for an empty or zero matrix)."""
    if A.shape[0] == 0:
        return 1.0
    sigma = scipy.linalg.svdvals(A)
    return float(sigma[-1] / sigma[0]) if sigma[0] > 0 else 0.0
