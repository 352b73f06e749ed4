"""
Symmetry-breaking experiment.

Leads attached along whole orbits of the parent give two quotients with the
same resonances. Leads attached to the two quotients at corresponding vertices,
but not coming from an orbit of the parent, generally do not.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

from qgraph._config import QGRAPH
from qgraph._errors import AnalysisError, GraphValidationError
from qgraph._utils import map_in_order
from qgraph.analysis._compare import compare_poles
from qgraph.analysis._models import ComparisonReport
from qgraph.graphs._models import ExtendedGraph, MetricGraph, as_extended, attach_leads
from qgraph.scattering._resonances import Rectangle, ResonanceOptions, ResonanceSet, resonances
from qgraph.symmetry._actions import GraphAction, ViolationKind, verify_action
from qgraph.symmetry._groups import Rep1D
from qgraph.symmetry._quotient import QuotientResult, quotient

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SymmetryBreakingResult:
    """
    Outcome of symmetry_breaking_experiment.

    Attributes:
        symmetric: Pole comparison of the quotients of the symmetric extension.
        broken: Pole comparison after attaching the symmetry-breaking leads to both
            quotients (None when no such leads were given).
        symmetric_graphs: The two quotients with symmetric leads.
        broken_graphs: The two quotients with the extra leads (None when not built).
        poles: Resonance sets in the order (symmetric 1, symmetric 2[, broken 1, broken 2]).
    """
    symmetric: ComparisonReport
    broken: ComparisonReport | None
    symmetric_graphs: tuple[ExtendedGraph, ExtendedGraph]
    broken_graphs: tuple[ExtendedGraph, ExtendedGraph] | None
    poles: tuple[ResonanceSet, ...]

    @property
    def measured_separation(self) -> float | None:
        """Largest pole distance of the broken comparison (None without one)."""
        return None if self.broken is None else self.broken.max_deviation

    @property
    def as_expected(self) -> bool:
        return self.symmetric.passed and (self.broken is None or not self.broken.passed)


def _breaks_lead_orbits(eg: ExtendedGraph, action: GraphAction) -> bool:
    return ViolationKind.LEAD_ORBIT in verify_action(eg, action).kinds()


def _node_of(q: QuotientResult, vertex_id: str) -> str:
    for node, provenance in q.nodes.items():
        if provenance.kind == "vertex" and vertex_id in provenance.orbit:
            return node
    raise AnalysisError(f"vertex {vertex_id!r} does not survive in the quotient by {q.rep.name or 'the representation'}")


def _attach_to_quotient(q: QuotientResult, vertices: Sequence[str]) -> ExtendedGraph:
    nodes = [_node_of(q, v) for v in vertices]
    ids = [f"B{i}" for i in range(1, len(nodes) + 1)]
    try:
        return attach_leads(q.quotient, nodes, lead_ids=ids)
    except GraphValidationError as e:
        raise AnalysisError(f"cannot attach the symmetry-breaking leads to the quotient by "
                            f"{q.rep.name or 'the representation'}: {e}") from e


def symmetry_breaking_experiment(
    parent: MetricGraph | ExtendedGraph,
    action: GraphAction,
    rep1: Rep1D,
    rep2: Rep1D,
    symmetric_leads: Sequence[str],
    broken_leads: Sequence[str],
    rect: Rectangle,
    opts: ResonanceOptions | None = None,
    tol: float | None = None,
) -> SymmetryBreakingResult:
    """
    Compare the resonances of symmetric and symmetry-breaking lead placements.

    Args:
        parent: The symmetric parent graph.
        action: Group action on the parent.
        rep1: First representation.
        rep2: Second representation (inducing the same representation as rep1).
        symmetric_leads: Parent vertices for leads; must be a union of orbits.
        broken_leads: Parent vertices for extra leads attached directly to both
            quotients at the nodes their orbits became; must not be a union of orbits.
        rect: Search rectangle in the lower half plane.
        opts: Resonance search options.
        tol: Pole matching tolerance (default QGRAPH.config.analysis.poles_tol).

    Raises:
        AnalysisError: If symmetric_leads break the orbit structure, broken_leads
            do not, or a broken lead lands on a vanishing or Dirichlet node.

    Example:
        >>> result = symmetry_breaking_experiment(parent, action, r1, r2, rim, ["U+"], rect)
        >>> result.symmetric.passed, result.broken.passed
        (True, False)
    """
    base = as_extended(parent)
    symmetric = attach_leads(base, list(symmetric_leads)) if symmetric_leads else base
    if _breaks_lead_orbits(symmetric, action):
        raise AnalysisError("symmetric leads do not form whole orbits of the group; "
                            "such a placement belongs in the symmetry-breaking leads")
    if broken_leads and not _breaks_lead_orbits(attach_leads(base, list(broken_leads)), action):
        raise AnalysisError(f"leads at {list(broken_leads)} form whole orbits of the group and are not symmetry-breaking")

    q1 = quotient(symmetric, action, rep1)
    q2 = quotient(symmetric, action, rep2)
    graphs: list[ExtendedGraph] = [q1.quotient, q2.quotient]
    broken_graphs: tuple[ExtendedGraph, ExtendedGraph] | None = None
    if broken_leads:
        broken_graphs = (_attach_to_quotient(q1, broken_leads), _attach_to_quotient(q2, broken_leads))
        graphs.extend(broken_graphs)

    cfg = QGRAPH.config
    found = map_in_order(lambda eg: resonances(eg, rect, opts), graphs, max_workers=min(len(graphs), cfg.runtime.jobs))

    symmetric_report = compare_poles(found[0], found[1], tol)
    broken_report = compare_poles(found[2], found[3], tol) if broken_leads else None
    if broken_report is not None:
        logger.info(
            f"{'SymmetryBreaking'[:26]:<26} | CMP  | measured pole separation with leads at "
            f"{list(broken_leads)}: {broken_report.max_deviation:.3e}"
        )
    return SymmetryBreakingResult(
        symmetric=symmetric_report,
        broken=broken_report,
        symmetric_graphs=(q1.quotient, q2.quotient),
        broken_graphs=broken_graphs,
        poles=tuple(found),
    )
