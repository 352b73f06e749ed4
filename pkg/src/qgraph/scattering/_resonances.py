"""
Resonances of extended graphs.

Resonances are the zeros of det A(k) in Im k < 0, where A is the outgoing-only
system of assemble_extended. det A is entire, so the number of zeros inside a
rectangle equals the winding number of det A along its boundary. The search:

1. counts zeros on the user rectangle (argument principle, LU log-determinant,
   adaptive phase unwrapping, boundary sampling doubled until stable);
2. bisects cells along their longer side until each holds at most one zero;
3. refines each simple zero by Newton iteration with a central-difference
   derivative of det A, expressed through determinant ratios.

A contour passing too close to a zero raises ContourError; the search is then
retried on a slightly shrunk contour (see Retrying) and fails with
ResonanceSearchError once the attempts are exhausted.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from qgraph._config import QGRAPH, QGRAPHConfig
from qgraph._errors import ContourError, ResonanceSearchError
from qgraph._retry import MaxRetriesExceededError, Retrying
from qgraph._utils import map_in_order, render_csv, save_text_file
from qgraph.graphs._io import graph_hash
from qgraph.graphs._models import ExtendedGraph, MetricGraph, as_extended
from qgraph.scattering._extended import LogDeterminant, assemble_extended, log_determinant, relative_sigma_min

logger = logging.getLogger(__name__)

# Bisection split fractions tried in order when a split line passes near a zero
_SPLIT_FRACTIONS = (0.5, 0.45, 0.55, 0.4, 0.6, 0.35, 0.65)
# Depth of recursive midpoint insertion while unwrapping the phase
_MAX_UNWRAP_DEPTH = 16
# Contour shrink per retry, relative to the smaller rectangle side
_SHRINK_FRACTION = 1e-3


@dataclass(frozen=True)
class Rectangle:
    """
    A closed rectangle in the complex k-plane.

    For resonance searches it must lie in the lower half plane (im_max < 0).

    Example:
        >>> rect = Rectangle.parse("0.5,7,-2,-0.01")
        >>> rect.contains(1.5708 - 0.5493j)
        True
    """
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self) -> None:
        values = (self.re_min, self.re_max, self.im_min, self.im_max)
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"rectangle bounds must be finite, got {values}")
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError(f"rectangle must satisfy re_min < re_max and im_min < im_max, got {values}")

    @classmethod
    def parse(cls, text: str) -> Rectangle:
        """Parse "re_min,re_max,im_min,im_max"."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected re_min,re_max,im_min,im_max, got {text!r}")
        try:
            re_min, re_max, im_min, im_max = (float(p) for p in parts)
        except ValueError:
            raise ValueError(f"rectangle bounds must be numbers, got {text!r}") from None
        return cls(re_min, re_max, im_min, im_max)

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.re_min, self.re_max, self.im_min, self.im_max)

    def contains(self, k: complex, margin: float = 0.0) -> bool:
        """Strict containment (a positive margin enlarges the rectangle)."""
        return (
            self.re_min - margin < k.real < self.re_max + margin
            and self.im_min - margin < k.imag < self.im_max + margin
        )

    def shrink(self, delta: float) -> Rectangle:
        return Rectangle(self.re_min + delta, self.re_max - delta, self.im_min + delta, self.im_max - delta)

    def split(self, fraction: float = 0.5) -> tuple[Rectangle, Rectangle]:
        """Split along the longer side at the given fraction."""
        if self.width >= self.height:
            cut = self.re_min + fraction * self.width
            return replace(self, re_max=cut), replace(self, re_min=cut)
        cut = self.im_min + fraction * self.height
        return replace(self, im_max=cut), replace(self, im_min=cut)

    def boundary(self, points_per_side: int) -> list[complex]:
        """Counter-clockwise boundary points starting at the lower-left corner (closing point omitted)."""
        t = np.arange(points_per_side) / points_per_side
        lower_left = complex(self.re_min, self.im_min)
        lower_right = complex(self.re_max, self.im_min)
        upper_right = complex(self.re_max, self.im_max)
        upper_left = complex(self.re_min, self.im_max)
        points: list[complex] = []
        for a, b in ((lower_left, lower_right), (lower_right, upper_right), (upper_right, upper_left),
                     (upper_left, lower_left)):
            points.extend(complex(a + (b - a) * s) for s in t)
        return points


def require_lower_half_plane(rect: Rectangle) -> None:
    if rect.im_max >= 0:
        raise ValueError(f"resonance rectangles must lie in Im k < 0, got im_max = {rect.im_max}")


@dataclass(frozen=True)
class Pole:
    """
    A resonance.

    Attributes:
        k: Location, Im k < 0.
        multiplicity: Number of zeros of det A merged into this pole.
        sigma_min: sigma_min / sigma_max of A(k) at the refined location.
        residual: Size of the last Newton step.
    """
    k: complex
    multiplicity: int = 1
    sigma_min: float = 0.0
    residual: float = 0.0


@dataclass(frozen=True)
class ResonanceOptions:
    """
    Options of the resonance search.

    Fields set to None use values from global config (QGRAPH.config.scattering / runtime).
    """
    contour_points: int | None = None
    winding_tol: float | None = None
    newton_k_tol: float | None = None
    merge_tol: float | None = None
    max_attempts: int | None = None
    jobs: int | None = None

    def with_defaults_from(self, cfg: QGRAPHConfig) -> ResonanceOptions:
        """Returns a new ResonanceOptions with None values filled from config."""
        return ResonanceOptions(
            contour_points=self.contour_points if self.contour_points is not None else cfg.scattering.contour_points,
            winding_tol=self.winding_tol if self.winding_tol is not None else cfg.scattering.winding_tol,
            newton_k_tol=self.newton_k_tol if self.newton_k_tol is not None else cfg.scattering.newton_k_tol,
            merge_tol=self.merge_tol if self.merge_tol is not None else cfg.scattering.merge_tol,
            max_attempts=self.max_attempts if self.max_attempts is not None else cfg.scattering.max_contour_attempts,
            jobs=self.jobs if self.jobs is not None else cfg.runtime.jobs,
        )


@dataclass(frozen=True)
class ResonanceSet:
    """
    Resonances found inside a search rectangle.

    Attributes:
        poles: Poles sorted by real part, each strictly inside `rect`.
        rect: The requested rectangle.
        contour: The rectangle whose boundary was actually integrated (shrunk on retries).
        winding: Winding number of det A along `contour`; equals the total multiplicity.
        attempts: Number of contour attempts used.
        warnings: Contour perturbations and other non-fatal events.
        graph_hash: `graph_hash` of the searched graph (None when built by hand).
    """

    poles: tuple[Pole, ...]
    rect: Rectangle
    contour: Rectangle
    winding: int
    attempts: int = 1
    warnings: tuple[str, ...] = field(default=())
    graph_hash: str | None = None

    def __post_init__(self) -> None:
        assert all(self.rect.contains(p.k) for p in self.poles), \
            "🌀 Sanity check | every pole must lie strictly inside the search rectangle."
        assert sum(p.multiplicity for p in self.poles) == self.winding, \
            "🌀 Sanity check | pole multiplicities must add up to the winding number."

    def __len__(self) -> int:
        return len(self.poles)

    def ks(self) -> np.ndarray:
        return np.array([p.k for p in self.poles], dtype=complex)

    def metadata(self) -> dict[str, Any]:
        return {
            "rect": list(self.rect.as_tuple()),
            "contour": list(self.contour.as_tuple()),
            "winding": self.winding,
            "attempts": self.attempts,
            "convention": "exp(ikx) outgoing, resonances in Im k < 0",
        }

    def render_csv(self, header: tuple[str, ...] = ()) -> str:
        return render_csv(
            ("re_k", "im_k", "sigma_min"),
            ((float(p.k.real), float(p.k.imag), float(p.sigma_min)) for p in self.poles),
            header,
        )

    def write_csv(self, path: str | Path, header: tuple[str, ...] = ()) -> None:
        """Write the poles as CSV with columns re_k, im_k, sigma_min."""
        save_text_file(self.render_csv(header), Path(path))


# =============================================================================
# Argument principle
# =============================================================================


@dataclass(frozen=True)
class _Sample:
    k: complex
    log_det: LogDeterminant
    sigma: float


class _WindingCounter:
    """Counts zeros of det A(k) inside rectangles of one extended graph."""

    def __init__(self, eg: ExtendedGraph, opts: ResonanceOptions, cfg: QGRAPHConfig):
        assert opts.contour_points is not None and opts.winding_tol is not None and opts.jobs is not None
        self.eg = eg
        self.points = opts.contour_points
        self.winding_tol = opts.winding_tol
        self.jobs = opts.jobs
        self.sigma_tol = cfg.scattering.contour_sigma_tol
        self.max_doublings = cfg.scattering.max_contour_doublings

    def sample(self, k: complex) -> _Sample:
        A, _ = assemble_extended(self.eg, k)
        result = _Sample(k=k, log_det=log_determinant(A), sigma=relative_sigma_min(A))
        if result.sigma < self.sigma_tol or result.log_det.log_abs == -math.inf:
            raise ContourError(
                f"contour passes too close to a zero of det A near k = {k:.10g} "
                f"(sigma_min/sigma_max = {result.sigma:.2e})"
            )
        return result

    def _increment(self, a: _Sample, b: _Sample, depth: int = 0) -> float:
        delta = math.remainder(b.log_det.phase - a.log_det.phase, 2 * math.pi)
        if abs(delta) <= math.pi / 2:
            return delta
        if depth >= _MAX_UNWRAP_DEPTH:
            raise ContourError(f"phase of det A not resolved between k = {a.k:.10g} and k = {b.k:.10g}")
        mid = self.sample(0.5 * (a.k + b.k))
        return self._increment(a, mid, depth + 1) + self._increment(mid, b, depth + 1)

    def winding(self, rect: Rectangle, points_per_side: int) -> float:
        samples = map_in_order(self.sample, rect.boundary(points_per_side), self.jobs)
        total = sum(self._increment(a, b) for a, b in zip(samples, samples[1:] + samples[:1], strict=True))
        return total / (2 * math.pi)

    def count(self, rect: Rectangle) -> int:
        """
        Stable integer winding number of det A along the rectangle boundary.

        Raises:
            ContourError: The boundary passes near a zero or the count does not stabilize.
        """
        points = self.points
        previous: int | None = None
        for _ in range(self.max_doublings + 1):
            w = self.winding(rect, points)
            nearest = round(w)
            if abs(w - nearest) > self.winding_tol or nearest < 0:
                raise ContourError(f"non-integer winding number {w:.4f} on {rect.as_tuple()}")
            if previous is not None and nearest == previous:
                return nearest
            previous = nearest
            points *= 2
        raise ContourError(f"winding number did not stabilize on {rect.as_tuple()}")


def count_zeros(
    eg: ExtendedGraph | MetricGraph,
    rect: Rectangle,
    opts: ResonanceOptions | None = None,
) -> int:
    """
    Number of zeros of det A(k) inside the rectangle (argument principle).

    Raises:
        ContourError: If the boundary passes too close to a zero.

    Example:
        >>> count_zeros(lead_between_dirichlet_edges, Rectangle(0.5, 7, -2, -0.01))
        2
    """
    cfg = QGRAPH.config
    resolved = (opts or ResonanceOptions()).with_defaults_from(cfg)
    return _WindingCounter(as_extended(eg), resolved, cfg).count(rect)


# =============================================================================
# Newton refinement
# =============================================================================


def _newton(eg: ExtendedGraph, k0: complex, cfg: QGRAPHConfig, k_tol: float) -> tuple[complex, float] | None:
    """Newton iteration on det A; returns (k, last step) or None when it does not converge."""
    k = k0
    for _ in range(cfg.scattering.newton_max_iter):
        h = cfg.scattering.newton_step_factor * (1 + abs(k))
        base = _log_det(eg, k)
        if base.log_abs == -math.inf:
            return k, 0.0
        ratio_plus = _log_det(eg, k + h).ratio(base)
        ratio_minus = _log_det(eg, k - h).ratio(base)
        slope = ratio_plus - ratio_minus
        if slope == 0 or not np.isfinite(slope):
            return None
        step = -2 * h / slope
        k = k + step
        if not (np.isfinite(k.real) and np.isfinite(k.imag)) or k.imag >= 0:
            return None
        if abs(step) < k_tol:
            return k, abs(step)
    return None


def _log_det(eg: ExtendedGraph, k: complex) -> LogDeterminant:
    A, _ = assemble_extended(eg, k)
    return log_determinant(A)


def _sigma_at(eg: ExtendedGraph, k: complex) -> float:
    A, _ = assemble_extended(eg, k)
    return relative_sigma_min(A)


# =============================================================================
# Search
# =============================================================================


@dataclass(frozen=True)
class _Cell:
    rect: Rectangle
    count: int
    depth: int


class _ResonanceSearch:
    """One search attempt on a fixed contour."""

    def __init__(self, eg: ExtendedGraph, opts: ResonanceOptions, cfg: QGRAPHConfig):
        assert opts.newton_k_tol is not None and opts.merge_tol is not None
        self.eg = eg
        self.cfg = cfg
        self.k_tol = opts.newton_k_tol
        self.merge_tol = opts.merge_tol
        self.counter = _WindingCounter(eg, opts, cfg)

    def run(self, contour: Rectangle) -> tuple[int, list[Pole]]:
        total = self.counter.count(contour)
        logger.debug(f"{'Resonances'[:26]:<26} | SCAT | 🔎 winding {total} on {contour.as_tuple()}")
        max_depth = self.cfg.scattering.max_bisection_depth
        poles: list[Pole] = []
        stack = [_Cell(contour, total, 0)] if total > 0 else []
        while stack:
            cell = stack.pop()
            if cell.count == 1:
                pole = self._refine(cell.rect)
                if pole is not None:
                    poles.append(pole)
                    continue
            elif cell.depth >= max_depth or max(cell.rect.width, cell.rect.height) < self.merge_tol:
                poles.append(self._multiple(cell))
                continue
            if cell.depth >= max_depth:
                raise ContourError(f"Newton refinement failed inside {cell.rect.as_tuple()}")
            stack.extend(self._bisect(cell))

        poles = _merge(poles, self.merge_tol)
        found = sum(p.multiplicity for p in poles)
        if found != total:
            raise ContourError(f"found {found} poles but the winding number is {total}")
        return total, poles

    def _bisect(self, cell: _Cell) -> list[_Cell]:
        last_error: ContourError | None = None
        for fraction in _SPLIT_FRACTIONS:
            first, second = cell.rect.split(fraction)
            try:
                c1 = self.counter.count(first)
                c2 = self.counter.count(second)
            except ContourError as e:
                last_error = e
                continue
            if c1 + c2 != cell.count:
                last_error = ContourError(f"child counts {c1} + {c2} differ from parent count {cell.count}")
                continue
            return [_Cell(r, c, cell.depth + 1) for r, c in ((first, c1), (second, c2)) if c > 0]
        assert last_error is not None
        raise last_error

    def _starting_points(self, rect: Rectangle) -> list[complex]:
        c = rect.center
        dx, dy = rect.width / 4, rect.height / 4
        return [c, c + complex(-dx, -dy), c + complex(dx, -dy), c + complex(dx, dy), c + complex(-dx, dy)]

    def _refine(self, rect: Rectangle) -> Pole | None:
        for start in self._starting_points(rect):
            result = _newton(self.eg, start, self.cfg, self.k_tol)
            if result is None:
                continue
            k, step = result
            if rect.contains(k, margin=10 * self.k_tol):
                return Pole(k=k, multiplicity=1, sigma_min=_sigma_at(self.eg, k), residual=step)
        return None

    def _multiple(self, cell: _Cell) -> Pole:
        result = _newton(self.eg, cell.rect.center, self.cfg, self.merge_tol)
        k = result[0] if result is not None and cell.rect.contains(result[0], margin=self.merge_tol) \
            else cell.rect.center
        step = result[1] if result is not None else max(cell.rect.width, cell.rect.height)
        return Pole(k=k, multiplicity=cell.count, sigma_min=_sigma_at(self.eg, k), residual=step)


def _merge(poles: list[Pole], tol: float) -> list[Pole]:
    merged: list[Pole] = []
    for pole in sorted(poles, key=lambda p: (p.k.real, p.k.imag)):
        close = next((i for i, m in enumerate(merged) if abs(m.k - pole.k) < tol), None)
        if close is None:
            merged.append(pole)
            continue
        other = merged[close]
        merged[close] = Pole(
            k=other.k,
            multiplicity=other.multiplicity + pole.multiplicity,
            sigma_min=min(other.sigma_min, pole.sigma_min),
            residual=max(other.residual, pole.residual),
        )
    return merged


def resonances(
    eg: ExtendedGraph | MetricGraph,
    rect: Rectangle,
    opts: ResonanceOptions | None = None,
) -> ResonanceSet:
    """
    Find all resonances inside a rectangle of the lower half plane.

    Args:
        eg: The extended graph.
        rect: Search rectangle with im_max < 0.
        opts: Search options; missing values come from QGRAPH.config.

    Returns:
        The ResonanceSet; the number of poles (with multiplicity) equals the
        winding number of det A along the contour used.

    Raises:
        ValueError: If the rectangle does not lie in Im k < 0.
        ResonanceSearchError: If every contour attempt passed too close to a zero.

    Example:
        >>> found = resonances(lead_between_dirichlet_edges, Rectangle(0.5, 7, -2, -0.01))
        >>> [complex(round(p.k.real, 4), round(p.k.imag, 4)) for p in found.poles]
        [(1.5708-0.5493j), (4.7124-0.5493j)]
    """
    require_lower_half_plane(rect)
    eg = as_extended(eg)
    cfg = QGRAPH.config
    resolved = (opts or ResonanceOptions()).with_defaults_from(cfg)
    assert resolved.max_attempts is not None

    search = _ResonanceSearch(eg, resolved, cfg)
    delta = _SHRINK_FRACTION * min(rect.width, rect.height)
    warnings: list[str] = []

    retrying = Retrying(max_attempts=resolved.max_attempts, perturbation_step=delta, logger_prefix="Resonances")
    try:
        for attempt in retrying:
            with attempt:
                contour = rect if attempt.is_first_attempt else rect.shrink(attempt.perturbation)
                if not attempt.is_first_attempt:
                    message = f"contour perturbed (attempt {attempt.attempt_number}): {contour.as_tuple()}"
                    logger.warning(f"{'Resonances'[:26]:<26} | SCAT | ⚠️ {message}")
                    warnings.append(message)
                winding, poles = search.run(contour)
                result = ResonanceSet(
                    poles=tuple(poles),
                    rect=rect,
                    contour=contour,
                    winding=winding,
                    attempts=attempt.attempt_number,
                    warnings=tuple(warnings),
                    graph_hash=graph_hash(eg),
                )
                break
        else:
            raise ResonanceSearchError(f"resonance search on {rect.as_tuple()} did not complete")
    except MaxRetriesExceededError as e:
        raise ResonanceSearchError(
            f"resonance search on {rect.as_tuple()} failed after {retrying.max_attempts} contour attempts: "
            f"{e.last_exception}"
        ) from e

    logger.info(
        f"{'Resonances'[:26]:<26} | SCAT | ✅ {len(result.poles)} poles in {rect.as_tuple()} "
        f"(winding {result.winding}, attempts {result.attempts})"
    )
    return result
