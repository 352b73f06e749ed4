"""
Transplantation between the two quotients of one symmetric graph.

Both quotients are sectors of the same parent: quotient i holds the functions
with f(h x) = R_i(h) f(x) for h in H_i. A transplantation maps one sector to
the other.

- On the leads it is T = E2^H E1, where E_i embeds quotient amplitudes
  isometrically into the parent lead space (flux normalization).
- On the graph the parent is cut into building blocks g D (g in G, D one
  segment per G-orbit). Quotient i consists of one block per right coset
  H_i g, and a function of the second sector is recovered from block
  restrictions of the first by

      f2(g'_j q) = sum_i T_ji f1(g_i q),
      T_ji = 1/|H2| sum_{h in H2} R2(h) R1(h g'_j g_i^-1) [h g'_j g_i^-1 in H1].
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from qgraph._config import QGRAPH
from qgraph._errors import AnalysisError
from qgraph.analysis._models import ComparisonItem, ComparisonKind, ComparisonReport, Transplantation
from qgraph.graphs._io import graph_hash
from qgraph.spectral._eigenfunction import Eigenfunction, edge_values, gram_matrix, vertex_condition_residual
from qgraph.symmetry._groups import FiniteGroup, Rep1D
from qgraph.symmetry._quotient import QuotientResult, Segment, SegmentOrbit, cut_edges, segment_orbits

logger = logging.getLogger(__name__)

# Representative choices tried by derive_block_map before giving up
_MAX_BLOCK_CHOICES = 200_000


def _require_same_parent(q1: QuotientResult, q2: QuotientResult) -> FiniteGroup:
    group = q1.action.group
    if not group.same_as(q2.action.group):
        raise AnalysisError("quotients were built from different groups")
    if graph_hash(q1.parent.graph) != graph_hash(q2.parent.graph):
        raise AnalysisError("quotients were built from different parent graphs")
    if q1.parent.lead_ids != q2.parent.lead_ids:
        raise AnalysisError("quotients were built from parents with different leads")
    return group


# =============================================================================
# Lead space
# =============================================================================


def _lead_embedding(q: QuotientResult) -> np.ndarray:
    """Isometric map from flux-normalized quotient lead amplitudes to parent lead amplitudes."""
    parent_ids = q.parent.lead_ids
    row = {lid: i for i, lid in enumerate(parent_ids)}
    embedding = np.zeros((len(parent_ids), len(q.quotient.leads)))
    for col, lead in enumerate(q.quotient.leads):
        source = q.lead_sources[lead.id]
        scale = source.tau / math.sqrt(len(source.orbit))
        for parent_lead, h in source.transport.items():
            embedding[row[parent_lead], col] = q.rep(h) * scale
    return embedding


def lead_transplantation(q1: QuotientResult, q2: QuotientResult) -> Transplantation:
    """
    Lead-space transplantation with T^-1 S2(k) T = S1(k).

    Lifts the leads of the first quotient to the parent, projects onto the second
    sector and restricts to the leads of the second quotient.

    Raises:
        AnalysisError: If the quotients come from different parents, or the map is singular.

    Example:
        >>> t = lead_transplantation(quotient(parent, action, r1), quotient(parent, action, r2))
        >>> t.is_proportional_to(BUILTIN_T)
        True
    """
    _require_same_parent(q1, q2)
    matrix = _lead_embedding(q2).T @ _lead_embedding(q1)
    if matrix.shape[0] != matrix.shape[1]:
        raise AnalysisError(f"quotients carry {matrix.shape[1]} and {matrix.shape[0]} leads")
    return Transplantation(matrix)


# =============================================================================
# Building blocks
# =============================================================================


def block_transplantation(
    group: FiniteGroup,
    rep1: Rep1D,
    rep2: Rep1D,
    reps1: Sequence[str],
    reps2: Sequence[str],
) -> np.ndarray:
    """
    Block matrix T_ji of the transplantation for chosen right coset representatives.

    Args:
        group: The ambient group G.
        rep1: R1 on H1.
        rep2: R2 on H2.
        reps1: One representative g_i per right coset H1 g_i.
        reps2: One representative g'_j per right coset H2 g'_j.
    """
    h1 = set(rep1.subgroup)
    matrix = np.zeros((len(reps2), len(reps1)))
    for j, g2 in enumerate(reps2):
        for i, g1 in enumerate(reps1):
            g1_inv = group.inverse(g1)
            total = 0
            for h in rep2.subgroup:
                x = group.product(h, g2, g1_inv)
                if x in h1:
                    total += rep2(h) * rep1(x)
            matrix[j, i] = total / len(rep2.subgroup)
    return matrix


@dataclass(frozen=True, eq=False)
class BlockMap:
    """
    Building blocks of two quotients of the same parent.

    Attributes:
        q1, q2: The quotients (source and target).
        reps1: Block representatives g_i, one per right coset of H1.
        reps2: Block representatives g'_j, one per right coset of H2.
        matrix: Block transplantation for these representatives.
        domain: Every parent segment (cut at G-reversed edges) mapped to its G-orbit.
    """

    q1: QuotientResult
    q2: QuotientResult
    reps1: tuple[str, ...]
    reps2: tuple[str, ...]
    matrix: np.ndarray
    domain: dict[Segment, SegmentOrbit] = field(repr=False)
    cut: frozenset[str] = field(default=frozenset(), repr=False)

    @property
    def group(self) -> FiniteGroup:
        return self.q1.action.group

    @property
    def blocks(self) -> int:
        return len(self.reps1)

    def validate(self) -> None:
        """
        Raises:
            AnalysisError: If a coset has no representative or a quotient edge lies outside the domain.
        """
        group = self.group
        for reps, rep, label in ((self.reps1, self.q1.rep, "first"), (self.reps2, self.q2.rep, "second")):
            cosets = group.right_cosets(rep.subgroup)
            covered = [next((c for c in cosets if g in c), None) for g in reps]
            if len(reps) != len(cosets) or any(c is None for c in covered) or len(set(covered)) != len(cosets):
                raise AnalysisError(f"incomplete block map: {label} quotient needs one representative per "
                                    f"right coset ({len(cosets)}), got {list(reps)}")
        if len(self.reps1) != len(self.reps2):
            raise AnalysisError(f"block counts differ: {len(self.reps1)} vs {len(self.reps2)}")
        for quotient in (self.q1, self.q2):
            for eid, source in quotient.edge_sources.items():
                segment = source.segment
                if segment.part == 0 and segment.edge in self.cut:
                    continue
                if segment not in self.domain:
                    raise AnalysisError(f"incomplete block map: quotient edge {eid!r} is not covered")

    def swapped(self) -> BlockMap:
        """The same map with the source blocks in reverse order."""
        return replace(self, reps1=tuple(reversed(self.reps1)))


def _coset_choices(cosets: list[tuple[str, ...]], permute: bool) -> Iterator[tuple[str, ...]]:
    orders = itertools.permutations(cosets) if permute else [tuple(cosets)]
    for order in orders:
        yield from itertools.product(*order)


def derive_block_map(
    q1: QuotientResult,
    q2: QuotientResult,
    transplantation: Transplantation | np.ndarray | None = None,
) -> BlockMap:
    """
    Building blocks of two quotients of the same parent.

    Without a transplantation the first element of every right coset is its block
    representative. With one, representative choices (and the order of the second
    quotient's blocks) are searched until the block matrix is proportional to it.

    Raises:
        AnalysisError: Different parents, different numbers of blocks, or no
            representative choice reproducing the transplantation.
    """
    group = _require_same_parent(q1, q2)
    cosets1 = group.right_cosets(q1.rep.subgroup)
    cosets2 = group.right_cosets(q2.rep.subgroup)
    if len(cosets1) != len(cosets2):
        raise AnalysisError(f"subgroups have different indices: {len(cosets1)} vs {len(cosets2)}")

    graph = q1.parent.graph
    cut = cut_edges(graph, q1.action, group.elements)
    domain = segment_orbits(graph, q1.action, group.elements, cut)

    def build(reps1: tuple[str, ...], reps2: tuple[str, ...]) -> BlockMap:
        matrix = block_transplantation(group, q1.rep, q2.rep, reps1, reps2)
        return BlockMap(q1=q1, q2=q2, reps1=reps1, reps2=reps2, matrix=matrix, domain=domain, cut=frozenset(cut))

    if transplantation is None:
        block_map = build(tuple(c[0] for c in cosets1), tuple(c[0] for c in cosets2))
        block_map.validate()
        return block_map

    target = transplantation if isinstance(transplantation, Transplantation) else Transplantation(transplantation)
    if target.dimension != len(cosets1):
        raise AnalysisError(f"transplantation has dimension {target.dimension}, quotients have {len(cosets1)} blocks")
    tried = 0
    for reps2 in _coset_choices(cosets2, permute=True):
        for reps1 in _coset_choices(cosets1, permute=False):
            tried += 1
            if tried > _MAX_BLOCK_CHOICES:
                raise AnalysisError(f"no block representatives reproduce the transplantation "
                                    f"after {_MAX_BLOCK_CHOICES} choices")
            matrix = block_transplantation(group, q1.rep, q2.rep, reps1, reps2)
            if target.is_proportional_to(matrix):
                logger.debug(f"{'BlockMap'[:26]:<26} | CMP  |   blocks {reps1} -> {reps2} after {tried} choices")
                block_map = BlockMap(q1=q1, q2=q2, reps1=reps1, reps2=reps2, matrix=matrix,
                                     domain=domain, cut=frozenset(cut))
                block_map.validate()
                return block_map
    raise AnalysisError("no block representatives reproduce the transplantation")


# =============================================================================
# Eigenfunctions
# =============================================================================


@dataclass(frozen=True, eq=False)
class TransplantedEigenfunction:
    """
    A transplanted eigenfunction candidate on the second quotient.

    Attributes:
        candidate: The candidate, normalized in the weighted L2 norm.
        residual: Vertex-condition defect of the candidate on the second quotient.
        fit_residual: Largest misfit of the sampled values by the edge basis, relative to the amplitude.
    """
    candidate: Eigenfunction
    residual: float
    fit_residual: float


def _segment_at(block_map: BlockMap, edge_id: str, x: float, length: float) -> Segment:
    if edge_id not in block_map.cut:
        return Segment(edge_id, 0)
    return Segment(edge_id, 1 if x <= length / 2 else 2)


def _to_representative(orbit: SegmentOrbit, segment: Segment, x: float, length: float) -> float:
    """Coordinate on the representative's edge of the preimage of x under the transporting element."""
    _, flip = orbit.transport[segment]
    if segment.part == 0:
        return length - x if flip else x
    distance = x if segment.part == 1 else length - x
    return distance if orbit.representative.part == 1 else length - distance


def _transplanted_value(block_map: BlockMap, T: np.ndarray, source: Eigenfunction, edge_id: str, x: float) -> complex:
    q1, q2 = block_map.q1, block_map.q2
    group = block_map.group
    action = q1.action
    parent = q1.parent.graph
    length = parent.edge(edge_id).length

    segment = _segment_at(block_map, edge_id, x, length)
    orbit = block_map.domain[segment]
    g, _ = orbit.transport[segment]
    x_rep = _to_representative(orbit, segment, x, length)

    h2 = set(q2.rep.subgroup)
    for j, g2 in enumerate(block_map.reps2):
        h = group.multiply(g, group.inverse(g2))
        if h in h2:
            break
    else:
        raise AnalysisError(f"incomplete block map: element {g!r} lies in no block of the second quotient")

    value = 0j
    for i, g1 in enumerate(block_map.reps1):
        if T[j, i] == 0:
            continue
        image_edge, image_x = action.point(g1, parent, orbit.representative.edge, x_rep)
        value += T[j, i] * complex(q1.lift_value(source.evaluate, image_edge, image_x)[0])
    return q2.rep(h) * value


def transplant_eigenfunction(
    ef: Eigenfunction,
    block_map: BlockMap,
    T: Transplantation | np.ndarray | None = None,
    samples: int | None = None,
) -> TransplantedEigenfunction:
    """
    Transplant an eigenfunction of the first quotient onto the second.

    Combines block restrictions of ef with T (default: the block map's own matrix),
    samples the result on every edge of the second quotient, fits the edge
    coefficients and evaluates the second quotient's vertex conditions at ef.k.

    Raises:
        AnalysisError: Incomplete block map, T of the wrong dimension, or a vanishing candidate.
    """
    block_map.validate()
    matrix = block_map.matrix if T is None else (T.T if isinstance(T, Transplantation) else np.asarray(T))
    if matrix.shape != (block_map.blocks, block_map.blocks):
        raise AnalysisError(f"transplantation of shape {matrix.shape} for {block_map.blocks} blocks")
    if T is not None and not Transplantation(matrix).is_proportional_to(block_map.matrix):
        logger.warning(f"{'Transplant'[:26]:<26} | CMP  | ⚠️ T is not proportional to the block matrix "
                       f"of the chosen representatives")

    n = samples or QGRAPH.config.analysis.transplant_samples
    q2 = block_map.q2
    target = q2.graph
    k = ef.k
    coefficients = np.zeros((len(target.edges), 2), dtype=complex)
    misfit = 0.0
    for idx, edge in enumerate(target.edges):
        source = q2.edge_sources[edge.id]
        segment = source.segment
        parent_length = q2.parent.graph.edge(segment.edge).length
        y = edge.length * (np.arange(n) + 0.5) / n
        x = parent_length - y if segment.part == 2 else y
        values = np.array([_transplanted_value(block_map, matrix, ef, segment.edge, float(xi)) for xi in x])
        values *= source.tau
        basis = np.column_stack((np.exp(1j * k * y), np.exp(1j * k * (edge.length - y))))
        fit, *_ = scipy.linalg.lstsq(basis, values)
        coefficients[idx] = fit
        misfit = max(misfit, float(np.max(np.abs(basis @ fit - values))) if n else 0.0)

    c = coefficients.reshape(-1)
    norm = float(np.sqrt(np.real(np.conj(c) @ gram_matrix(target, k) @ c)))
    if not norm > 1e-12 * max(ef.norm(), 1.0):
        raise AnalysisError(f"transplanted function vanishes at k = {k:.12g}")
    coefficients /= norm

    residual = vertex_condition_residual(target, k, coefficients)
    amplitude = max(float(np.max(np.abs(edge_values(k, e.length, coefficients[i], np.linspace(0, e.length, 5)))))
                    for i, e in enumerate(target.edges))
    candidate = Eigenfunction(graph=target, k=k, coefficients=coefficients, residual=residual)
    logger.debug(f"{'Transplant'[:26]:<26} | CMP  |   k = {k:.10g}: residual {residual:.2e}, fit {misfit / norm:.2e}")
    return TransplantedEigenfunction(
        candidate=candidate,
        residual=residual,
        fit_residual=misfit / norm / amplitude if amplitude > 0 else 0.0,
    )


def transplant_report(
    eigenfunctions: Sequence[Eigenfunction],
    block_map: BlockMap,
    T: Transplantation | np.ndarray | None = None,
    tol: float | None = None,
) -> ComparisonReport:
    """Transplant every eigenfunction and report the vertex-condition residuals."""
    tolerance = QGRAPH.config.analysis.transplant_tol if tol is None else tol
    items = []
    for n, ef in enumerate(eigenfunctions, start=1):
        result = transplant_eigenfunction(ef, block_map, T)
        items.append(ComparisonItem(f"{n}: k={ef.k:.12g}", complex(ef.k), complex(ef.k), result.residual))
    return ComparisonReport(
        kind=ComparisonKind.TRANSPLANT,
        items=tuple(items),
        tolerance=tolerance,
        metadata={
            "blocks_1": list(block_map.reps1),
            "blocks_2": list(block_map.reps2),
            "block_matrix": block_map.matrix.tolist(),
        },
    )
