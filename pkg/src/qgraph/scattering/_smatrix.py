"""
Scattering matrices of extended graphs.

Sign convention: a lead carries a_in * exp(-ikx) + a_out * exp(ikx), exp(ikx)
outgoing. S maps a_in to a_out in lead declaration order and is reported in
flux-normalized amplitudes sqrt(w_l) * a_l (the raw S for unit lead weights).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import scipy.linalg

from qgraph._config import QGRAPH
from qgraph._errors import InvalidWavenumberError, PoleProximityError
from qgraph._utils import render_csv, save_text_file
from qgraph.graphs._models import ExtendedGraph, MetricGraph, as_extended
from qgraph.scattering._extended import assemble_extended
from qgraph.spectral._secular import require_nonzero

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ScatteringMatrix:
    """
    S(k) of an extended graph.

    Attributes:
        k: The requested wavenumber.
        S: Complex |L| x |L| matrix, rows and columns in lead order.
        lead_ids: Lead ids labelling rows and columns.
        evaluated_k: Where S was actually evaluated (differs from k when perturbed).
        perturbed: True if A(k) was singular at real k and S was taken at k * (1 + real_k_shift).
        condition: sigma_max / sigma_min of A at evaluated_k.
    """

    k: complex
    S: np.ndarray
    lead_ids: tuple[str, ...]
    evaluated_k: complex
    perturbed: bool = False
    condition: float = 1.0
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        n = len(self.lead_ids)
        assert self.S.shape == (n, n), f"🌀 Sanity check | S must be {n}x{n}, got {self.S.shape}"

    @property
    def size(self) -> int:
        return len(self.lead_ids)

    def unitarity_defect(self) -> float:
        """max |S S^dagger - I| (meaningful on the real axis)."""
        if self.size == 0:
            return 0.0
        return float(np.max(np.abs(self.S @ np.conj(self.S.T) - np.eye(self.size))))

    def reciprocity_defect(self) -> float:
        """max |S - S^T|."""
        if self.size == 0:
            return 0.0
        return float(np.max(np.abs(self.S - self.S.T)))

    def eigenphases(self) -> np.ndarray:
        return eigenphases(self.S)

    def metadata(self) -> dict[str, Any]:
        return {
            "k": [self.k.real, self.k.imag],
            "evaluated_k": [self.evaluated_k.real, self.evaluated_k.imag],
            "perturbed": self.perturbed,
            "condition": self.condition,
            "leads": list(self.lead_ids),
            "convention": "exp(ikx) outgoing",
        }

    def render_csv(self, header: tuple[str, ...] = ()) -> str:
        rows = (
            (i, j, float(self.S[i, j].real), float(self.S[i, j].imag))
            for i in range(self.size) for j in range(self.size)
        )
        return render_csv(("row", "col", "re", "im"), rows, header)

    def write_csv(self, path: str | Path, header: tuple[str, ...] = ()) -> None:
        """Write S as CSV with columns row, col, re, im (0-based indices in lead order)."""
        save_text_file(self.render_csv(header), Path(path))


def eigenphases(S: np.ndarray) -> np.ndarray:
    """Sorted arguments of the eigenvalues of S (invariant under similarity)."""
    if S.shape[0] == 0:
        return np.zeros(0)
    return np.sort(np.angle(scipy.linalg.eigvals(S)))


def _solve_outgoing(eg: ExtendedGraph, k: complex) -> tuple[np.ndarray, float]:
    A, B = assemble_extended(eg, k)
    sigma = scipy.linalg.svdvals(A)
    ratio = float(sigma[-1] / sigma[0]) if sigma[0] > 0 else 0.0
    if ratio < QGRAPH.config.scattering.singular_tol:
        return np.zeros(0), ratio
    x = scipy.linalg.lu_solve(scipy.linalg.lu_factor(A), B)
    n_edge_unknowns = 2 * len(eg.graph.edges)
    return x[n_edge_unknowns:, :], ratio


def smatrix(eg: ExtendedGraph | MetricGraph, k: complex) -> ScatteringMatrix:
    """
    Scattering matrix at (real or complex) k.

    At real k where A(k) is numerically singular (an eigenfunction invisible to
    the leads), S is evaluated at k * (1 + real_k_shift) and flagged as perturbed.

    Raises:
        InvalidWavenumberError: For k = 0.
        PoleProximityError: If A(k) is singular at complex k (k is, or is very
            close to, a resonance).

    Example:
        >>> sm = smatrix(lead_on_dirichlet_edge, 1.3)
        >>> np.allclose(sm.S, [[-np.exp(2j * 1.3)]])
        True
    """
    eg = as_extended(eg)
    k = require_nonzero(k)
    ids = eg.lead_ids
    if not eg.leads:
        return ScatteringMatrix(k=k, S=np.zeros((0, 0), dtype=complex), lead_ids=ids, evaluated_k=k)

    cfg = QGRAPH.config.scattering
    evaluated_k = k
    perturbed = False
    warnings: list[str] = []
    a_out, ratio = _solve_outgoing(eg, k)
    if a_out.size == 0:
        if k.imag != 0:
            raise PoleProximityError(
                f"pole proximity: A(k) is singular at k = {k:.12g} (sigma_min/sigma_max = {ratio:.2e})"
            )
        evaluated_k = k * (1 + cfg.real_k_shift)
        message = (
            f"A(k) singular at real k = {k.real:.12g} (embedded eigenvalue); "
            f"S evaluated at k = {evaluated_k.real:.15g}"
        )
        logger.warning(f"{'ScatteringMatrix'[:26]:<26} | SCAT | ⚠️ {message}")
        warnings.append(message)
        perturbed = True
        a_out, ratio = _solve_outgoing(eg, evaluated_k)
        if a_out.size == 0:
            raise PoleProximityError(f"pole proximity: A(k) stays singular after perturbing k = {k.real:.12g}")

    sqrt_w = np.sqrt(eg.lead_weights)
    S = (sqrt_w[:, None] * a_out) / sqrt_w[None, :]
    return ScatteringMatrix(
        k=k,
        S=S,
        lead_ids=ids,
        evaluated_k=evaluated_k,
        perturbed=perturbed,
        condition=math.inf if ratio == 0 else 1.0 / ratio,
        warnings=tuple(warnings),
    )


def unitarity_defect(eg: ExtendedGraph | MetricGraph, k: float) -> float:
    """
    max |S(k) S(k)^dagger - I| at real k > 0.

    Raises:
        InvalidWavenumberError: If k is not real and positive.
    """
    k_value = complex(k)
    if k_value.imag != 0 or k_value.real <= 0:
        raise InvalidWavenumberError(f"unitarity is checked at real k > 0, got {k!r}")
    return smatrix(eg, k_value.real).unitarity_defect()
