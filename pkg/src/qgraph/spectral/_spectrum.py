"""
Real-axis spectrum of a compact metric graph.

The spectrum is the set of k > 0 where the secular matrix is rank deficient. The
search scans sigma_min, divided by the fixed `secular_scale`, on a uniform
grid, brackets every local minimum and refines it with Brent's method (scipy.optimize.minimize_scalar). A refined
minimum is an eigenvalue when its scaled sigma_min is below the rank tolerance;
its multiplicity is the number of scaled singular values below that tolerance.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

from qgraph._config import QGRAPH, QGRAPHConfig
from qgraph._utils import map_in_order, render_csv, save_text_file
from qgraph.graphs._io import graph_hash
from qgraph.graphs._models import MetricGraph
from qgraph.spectral._secular import assemble_secular

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectrumOptions:
    """
    Options of the eigenvalue search.

    Fields set to None use values from global config (QGRAPH.config.spectral / runtime).

    Attributes:
        scan_step: Grid step; defaults to scan_fraction * pi / total_length.
        k_tol: Absolute tolerance on refined eigenvalues.
        rank_tol: Threshold on scaled singular values for rank deficiency.
        jobs: Worker threads for the grid scan.
    """
    scan_step: float | None = None
    k_tol: float | None = None
    rank_tol: float | None = None
    jobs: int | None = None

    def with_defaults_from(self, cfg: QGRAPHConfig, total_length: float) -> SpectrumOptions:
        """Returns a new SpectrumOptions with None values filled from config."""
        step = self.scan_step
        if step is None:
            step = cfg.spectral.scan_fraction * math.pi / total_length
        return SpectrumOptions(
            scan_step=step,
            k_tol=self.k_tol if self.k_tol is not None else cfg.spectral.k_tol,
            rank_tol=self.rank_tol if self.rank_tol is not None else cfg.spectral.rank_tol,
            jobs=self.jobs if self.jobs is not None else cfg.runtime.jobs,
        )


@dataclass(frozen=True)
class SpectralLine:
    """An eigenvalue k with its multiplicity and the scaled sigma_min at the refined k."""
    k: float
    multiplicity: int
    sigma_min: float

    def __post_init__(self) -> None:
        assert self.k > 0, f"eigenvalue must be positive, got {self.k}"
        assert self.multiplicity >= 1, f"multiplicity must be >= 1, got {self.multiplicity}"


@dataclass(frozen=True)
class Spectrum:
    """
    Eigenvalues of a compact graph inside a search interval.

    Attributes:
        eigenvalues: Strictly increasing lines inside (k_min, k_max).
        k_min, k_max: The search interval.
        scan_step, k_tol, rank_tol: The tolerances actually used.
        zero_mode_multiplicity: Number of constant k = 0 modes (components without Dirichlet vertices).
        warnings: Grid-resolution warnings raised during the search.
        graph_hash: `graph_hash` of the searched graph (None when built by hand).
    """

    eigenvalues: tuple[SpectralLine, ...]
    k_min: float
    k_max: float
    scan_step: float
    k_tol: float
    rank_tol: float
    zero_mode_multiplicity: int = 0
    warnings: tuple[str, ...] = field(default=())
    graph_hash: str | None = None

    def __post_init__(self) -> None:
        ks = [line.k for line in self.eigenvalues]
        assert all(a < b for a, b in zip(ks, ks[1:], strict=False)), \
            "🌀 Sanity check | eigenvalues must be strictly increasing."
        assert all(self.k_min < k < self.k_max for k in ks), \
            "🌀 Sanity check | eigenvalues must lie inside the search interval."

    @property
    def has_zero_mode(self) -> bool:
        return self.zero_mode_multiplicity > 0

    @property
    def count(self) -> int:
        """Number of eigenvalues counted with multiplicity."""
        return sum(line.multiplicity for line in self.eigenvalues)

    def ks(self) -> np.ndarray:
        """Eigenvalues repeated according to multiplicity."""
        return np.array([line.k for line in self.eigenvalues for _ in range(line.multiplicity)], dtype=float)

    def counts(self, k: float) -> int:
        """Eigenvalues below k counted with multiplicity (the Weyl counting function)."""
        return sum(line.multiplicity for line in self.eigenvalues if line.k < k)

    def multiplicity(self, k: float, tol: float = 1e-8) -> int:
        """Multiplicity of the eigenvalue closest to k within tol (0 if none)."""
        for line in self.eigenvalues:
            if abs(line.k - k) <= tol:
                return line.multiplicity
        return 0

    def metadata(self) -> dict[str, float | int]:
        return {
            "k_min": self.k_min,
            "k_max": self.k_max,
            "scan_step": self.scan_step,
            "k_tol": self.k_tol,
            "rank_tol": self.rank_tol,
            "zero_mode_multiplicity": self.zero_mode_multiplicity,
        }

    def render_csv(self, header: tuple[str, ...] = ()) -> str:
        return render_csv(
            ("k", "multiplicity"),
            ((line.k, line.multiplicity) for line in self.eigenvalues),
            header,
        )

    def write_csv(self, path: str | Path, header: tuple[str, ...] = ()) -> None:
        """Write the spectrum as CSV with columns k, multiplicity."""
        save_text_file(self.render_csv(header), Path(path))


def scaled_singular_values(g: MetricGraph, k: float) -> np.ndarray:
    """Singular values of the secular matrix divided by `secular_scale(g)`."""
    return assemble_secular(g, k).scaled_singular_values()


def _sigma_min(g: MetricGraph, k: float) -> float:
    return assemble_secular(g, k).scaled_sigma_min()


def spectrum(
    g: MetricGraph,
    k_min: float,
    k_max: float,
    opts: SpectrumOptions | None = None,
) -> Spectrum:
    """
    Find all eigenvalues k in (k_min, k_max).

    Args:
        g: The compact graph.
        k_min: Lower end of the search interval (> 0).
        k_max: Upper end of the search interval.
        opts: Search options; missing values come from QGRAPH.config.

    Returns:
        The Spectrum with multiplicities and the tolerances used. Two eigenvalues
        closer than warn_factor * scan_step are kept but logged and listed in
        `warnings`, since the grid may be too coarse there.

    Raises:
        ValueError: If the interval is invalid or the graph has no edges.

    Example:
        >>> spec = spectrum(interval, 0.1, 10.0)
        >>> [round(line.k, 6) for line in spec.eigenvalues]
        [3.141593, 6.283185, 9.424778]
    """
    if not (0 < k_min < k_max and math.isfinite(k_max)):
        raise ValueError(f"search interval must satisfy 0 < k_min < k_max, got ({k_min}, {k_max})")
    if not g.edges:
        raise ValueError("cannot compute the spectrum of a graph without edges")

    cfg = QGRAPH.config
    resolved = (opts or SpectrumOptions()).with_defaults_from(cfg, g.total_length)
    assert resolved.scan_step is not None and resolved.k_tol is not None
    assert resolved.rank_tol is not None and resolved.jobs is not None
    step, k_tol, rank_tol = resolved.scan_step, resolved.k_tol, resolved.rank_tol
    if step <= 0:
        raise ValueError(f"scan_step must be positive, got {step}")

    # One extra node on each side so minima in the first/last cell are bracketed
    n_cells = max(2, math.ceil((k_max - k_min) / step))
    grid = np.linspace(k_min, k_max, n_cells + 1)
    h = grid[1] - grid[0]
    lower = grid[0] - h if grid[0] - h > 0 else grid[0] / 2
    grid = np.concatenate([[lower], grid, [grid[-1] + h]])

    sigmas = np.array(map_in_order(lambda k: _sigma_min(g, float(k)), [float(k) for k in grid], resolved.jobs))

    candidates = [
        i for i in range(1, len(grid) - 1)
        if sigmas[i] <= sigmas[i - 1] and sigmas[i] <= sigmas[i + 1]
    ]
    logger.debug(
        f"{'Spectrum'[:26]:<26} | SPEC | 🔎 scanned {len(grid)} points, {len(candidates)} local minima"
    )

    def metric(k: float) -> float:
        return _sigma_min(g, float(k))

    def refine(i: int) -> tuple[float, float]:
        a, b, c = float(grid[i - 1]), float(grid[i]), float(grid[i + 1])
        if sigmas[i] < min(sigmas[i - 1], sigmas[i + 1]):
            # Brent's tol is relative to |k|
            result = minimize_scalar(metric, bracket=(a, b, c), method="brent", tol=k_tol / max(1.0, b))
        else:
            # Plateau, no strict bracket
            result = minimize_scalar(metric, bounds=(a, c), method="bounded", options={"xatol": k_tol})
        return float(result.x), float(result.fun)

    refined = map_in_order(refine, candidates, resolved.jobs)

    lines: list[SpectralLine] = []
    merge_tol = max(100 * k_tol, 1e-9)
    for k, sigma_min in sorted(refined):
        if sigma_min >= rank_tol or not (k_min < k < k_max):
            continue
        if lines and abs(k - lines[-1].k) < merge_tol:
            continue
        sv = scaled_singular_values(g, k)
        multiplicity = max(1, int(np.count_nonzero(sv < rank_tol)))
        lines.append(SpectralLine(k=k, multiplicity=multiplicity, sigma_min=sigma_min))

    warnings: list[str] = []
    limit = cfg.spectral.warn_factor * step
    for left, right in zip(lines, lines[1:], strict=False):
        if right.k - left.k < limit:
            message = (
                f"eigenvalues {left.k:.12g} and {right.k:.12g} are closer than {limit:.3g}; "
                f"the scan grid may be too coarse"
            )
            logger.warning(f"{'Spectrum'[:26]:<26} | SPEC | ⚠️ {message}")
            warnings.append(message)

    logger.info(f"{'Spectrum'[:26]:<26} | SPEC | ✅ {len(lines)} eigenvalues in ({k_min}, {k_max})")
    return Spectrum(
        eigenvalues=tuple(lines),
        k_min=float(k_min),
        k_max=float(k_max),
        scan_step=step,
        k_tol=k_tol,
        rank_tol=rank_tol,
        zero_mode_multiplicity=g.zero_mode_multiplicity(),
        warnings=tuple(warnings),
        graph_hash=graph_hash(g),
    )
