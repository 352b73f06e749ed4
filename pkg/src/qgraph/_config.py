"""
Numerical tolerances and runtime settings shared by every qgraph operation.

Each section is a frozen dataclass whose defaults work out of the box. A value
is resolved from, in decreasing priority:

1. the per-call options object (SpectrumOptions, ResonanceOptions, ...)
2. QGRAPH.configure(...)
3. a QGRAPH_* environment variable (skipped with allow_env_override=False)
4. the dataclass default

Example:
    >>> from qgraph import QGRAPH
    >>> QGRAPH.configure(spectral={"scan_fraction": 0.02}, runtime={"jobs": 4})
    >>> QGRAPH.config.spectral.scan_fraction
    0.02
"""

from __future__ import annotations

import os
from collections.abc import Callable, Mapping
from dataclasses import Field, dataclass, field, fields, replace
from typing import Any, Self

_SECTIONS: tuple[str, ...] = ("spectral", "scattering", "analysis", "runtime")
_NUMERICAL_SECTIONS: tuple[str, ...] = ("spectral", "scattering", "analysis")

_TRUTHY = frozenset({"1", "true", "yes", "on"})
_FALSY = frozenset({"0", "false", "no", "off"})


class ConfigEnvVarError(ValueError):
    """A QGRAPH_* environment variable could not be parsed."""

    def __init__(self, env_var: str, value: str, expected_type: str, cause: Exception | None = None):
        super().__init__(f"Invalid value for {env_var}: '{value}' (expected {expected_type})")
        self.env_var = env_var
        self.value = value
        self.expected_type = expected_type
        self.__cause__ = cause


class ConfigValidationError(ValueError):
    """A section field is outside its allowed range."""

    def __init__(self, field: str, value: Any, message: str, section: str | None = None):
        where = f"[{section}] " if section else ""
        super().__init__(f"{where}Invalid value for '{field}': {value!r}. {message}")
        self.field = field
        self.value = value
        self.section = section


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in _TRUTHY:
        return True
    if lowered in _FALSY:
        return False
    raise ValueError(f"not a boolean: {raw!r}")


# Annotations are strings under postponed evaluation.
_PARSERS: dict[str, Callable[[str], Any]] = {"int": int, "float": float, "bool": _parse_bool, "str": str}


def _env_value(f: Field[Any]) -> tuple[str, Any] | None:
    """Read the env var declared in a field's metadata; None when unset or empty."""
    env_var = f.metadata.get("env")
    raw = os.environ.get(env_var) if env_var else None
    if not raw:
        return None
    type_name = f.type if isinstance(f.type, str) else getattr(f.type, "__name__", str(f.type))
    parse = _PARSERS.get(type_name, str)
    try:
        return env_var, parse(raw)
    except (TypeError, ValueError) as e:
        raise ConfigEnvVarError(env_var, raw, type_name, cause=e) from e


@dataclass(frozen=True)
class OverridableConfig:
    """
    Shared behaviour of the section dataclasses.

    `with_overrides` rejects unknown names so a misspelt tolerance fails loudly
    instead of being ignored. None values leave the field untouched.
    """

    def with_overrides(self, overrides: Mapping[str, Any]) -> Self:
        known = {f.name for f in fields(self)}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise ValueError(f"Unknown config fields: {unknown}. Valid fields are: {sorted(known)}")
        changes = {name: value for name, value in overrides.items() if value is not None}
        return replace(self, **changes) if changes else self

    def env_overrides(self) -> dict[str, tuple[str, Any]]:
        """Map field name to (env var, parsed value) for every QGRAPH_* variable that is set."""
        found: dict[str, tuple[str, Any]] = {}
        for f in fields(self):
            hit = _env_value(f)
            if hit is not None:
                found[f.name] = hit
        return found

    def with_env_vars(self) -> Self:
        return self.with_overrides({name: value for name, (_, value) in self.env_overrides().items()})


def _require_positive(section: str, name: str, value: float) -> None:
    if not value > 0:
        raise ConfigValidationError(name, value, "Must be greater than 0.", section=section)


def _require_below_one(section: str, name: str, value: float) -> None:
    if not 0 < value < 1:
        raise ConfigValidationError(name, value, "Must be in the open interval (0, 1).", section=section)


@dataclass(frozen=True)
class LibraryConfig:
    """
    Library metadata (read-only, not configurable).

    Attributes:
        version: The installed qgraph version, stamped into every run manifest.

    Example:
        >>> from qgraph import QGRAPH
        >>> QGRAPH.config.library.version
        '0.1.0'
    """

    version: str

    @classmethod
    def detect(cls) -> LibraryConfig:
        """Detect library metadata from the installed distribution."""
        from qgraph import __version__

        return cls(version=__version__)


@dataclass(frozen=True)
class SpectralConfig(OverridableConfig):
    """
    Tolerances for the real-axis eigenvalue search of compact graphs.

    Attributes:
        scan_fraction: Grid step for the sigma_min scan as a fraction of pi/total_length.
            Env var: QGRAPH_SPECTRAL_SCAN_FRACTION

        k_tol: Absolute tolerance on refined eigenvalues.
            Env var: QGRAPH_SPECTRAL_K_TOL

        rank_tol: Relative singular-value threshold (times sigma_max) below which a
            singular value counts towards the multiplicity.
            Env var: QGRAPH_SPECTRAL_RANK_TOL

        warn_factor: Two eigenvalues closer than warn_factor * scan_step trigger a warning.
            Env var: QGRAPH_SPECTRAL_WARN_FACTOR
    """

    scan_fraction: float = field(default=0.05, metadata={"env": "QGRAPH_SPECTRAL_SCAN_FRACTION"})
    k_tol: float = field(default=1e-11, metadata={"env": "QGRAPH_SPECTRAL_K_TOL"})
    rank_tol: float = field(default=1e-8, metadata={"env": "QGRAPH_SPECTRAL_RANK_TOL"})
    warn_factor: float = field(default=2.0, metadata={"env": "QGRAPH_SPECTRAL_WARN_FACTOR"})

    def validate(self) -> Self:
        """Validate spectral configuration fields."""
        _require_positive("spectral", "scan_fraction", self.scan_fraction)
        _require_positive("spectral", "k_tol", self.k_tol)
        _require_below_one("spectral", "rank_tol", self.rank_tol)
        _require_positive("spectral", "warn_factor", self.warn_factor)
        return self


@dataclass(frozen=True)
class ScatteringConfig(OverridableConfig):
    """
    Tolerances for scattering matrices and the complex resonance search.

    Attributes:
        singular_tol: Relative sigma_min below which the extended system counts as singular.
            Env var: QGRAPH_SCATTERING_SINGULAR_TOL

        real_k_shift: Relative shift applied to a real k where the system is singular.
            Env var: QGRAPH_SCATTERING_REAL_K_SHIFT

        contour_points: Initial number of samples per rectangle side.
            Env var: QGRAPH_SCATTERING_CONTOUR_POINTS

        max_contour_doublings: How often the side sampling may double while the winding settles.
            Env var: QGRAPH_SCATTERING_MAX_CONTOUR_DOUBLINGS

        max_contour_attempts: Contour perturbations tried before the search gives up.
            Env var: QGRAPH_SCATTERING_MAX_CONTOUR_ATTEMPTS

        winding_tol: Allowed distance of the accumulated winding from an integer.
            Env var: QGRAPH_SCATTERING_WINDING_TOL

        contour_sigma_tol: Relative sigma_min on the contour that counts as passing through a zero.
            Env var: QGRAPH_SCATTERING_CONTOUR_SIGMA_TOL

        newton_k_tol: Step size at which the pole Newton iteration stops.
            Env var: QGRAPH_SCATTERING_NEWTON_K_TOL

        newton_max_iter: Iteration cap of the pole Newton iteration.
            Env var: QGRAPH_SCATTERING_NEWTON_MAX_ITER

        newton_step_factor: Central-difference step as a multiple of (1 + |k|).
            Env var: QGRAPH_SCATTERING_NEWTON_STEP_FACTOR

        merge_tol: Poles closer than this are merged and reported with multiplicity.
            Env var: QGRAPH_SCATTERING_MERGE_TOL

        max_bisection_depth: Deepest rectangle subdivision before a cell is refined as-is.
            Env var: QGRAPH_SCATTERING_MAX_BISECTION_DEPTH
    """

    singular_tol: float = field(default=1e-12, metadata={"env": "QGRAPH_SCATTERING_SINGULAR_TOL"})
    real_k_shift: float = field(default=1e-9, metadata={"env": "QGRAPH_SCATTERING_REAL_K_SHIFT"})
    contour_points: int = field(default=64, metadata={"env": "QGRAPH_SCATTERING_CONTOUR_POINTS"})
    max_contour_doublings: int = field(default=6, metadata={"env": "QGRAPH_SCATTERING_MAX_CONTOUR_DOUBLINGS"})
    max_contour_attempts: int = field(default=5, metadata={"env": "QGRAPH_SCATTERING_MAX_CONTOUR_ATTEMPTS"})
    winding_tol: float = field(default=0.1, metadata={"env": "QGRAPH_SCATTERING_WINDING_TOL"})
    contour_sigma_tol: float = field(default=1e-9, metadata={"env": "QGRAPH_SCATTERING_CONTOUR_SIGMA_TOL"})
    newton_k_tol: float = field(default=1e-11, metadata={"env": "QGRAPH_SCATTERING_NEWTON_K_TOL"})
    newton_max_iter: int = field(default=60, metadata={"env": "QGRAPH_SCATTERING_NEWTON_MAX_ITER"})
    newton_step_factor: float = field(default=1e-6, metadata={"env": "QGRAPH_SCATTERING_NEWTON_STEP_FACTOR"})
    merge_tol: float = field(default=1e-6, metadata={"env": "QGRAPH_SCATTERING_MERGE_TOL"})
    max_bisection_depth: int = field(default=24, metadata={"env": "QGRAPH_SCATTERING_MAX_BISECTION_DEPTH"})

    def validate(self) -> Self:
        """Validate scattering configuration fields."""
        _require_below_one("scattering", "singular_tol", self.singular_tol)
        _require_below_one("scattering", "real_k_shift", self.real_k_shift)
        if self.contour_points < 8:
            raise ConfigValidationError(
                "contour_points", self.contour_points,
                "Must be >= 8.", section="scattering"
            )
        if self.max_contour_doublings < 0:
            raise ConfigValidationError(
                "max_contour_doublings", self.max_contour_doublings,
                "Must be >= 0.", section="scattering"
            )
        if self.max_contour_attempts < 1:
            raise ConfigValidationError(
                "max_contour_attempts", self.max_contour_attempts,
                "Must be >= 1.", section="scattering"
            )
        if not 0 < self.winding_tol < 0.5:
            raise ConfigValidationError(
                "winding_tol", self.winding_tol,
                "Must be in the open interval (0, 0.5).", section="scattering"
            )
        _require_below_one("scattering", "contour_sigma_tol", self.contour_sigma_tol)
        _require_positive("scattering", "newton_k_tol", self.newton_k_tol)
        if self.newton_max_iter < 1:
            raise ConfigValidationError(
                "newton_max_iter", self.newton_max_iter,
                "Must be >= 1.", section="scattering"
            )
        _require_below_one("scattering", "newton_step_factor", self.newton_step_factor)
        _require_positive("scattering", "merge_tol", self.merge_tol)
        if self.max_bisection_depth < 1:
            raise ConfigValidationError(
                "max_bisection_depth", self.max_bisection_depth,
                "Must be >= 1.", section="scattering"
            )
        return self


@dataclass(frozen=True)
class AnalysisConfig(OverridableConfig):
    """
    Default tolerances of the cross-graph comparisons.

    Attributes:
        spectra_tol: Pass threshold of compare_spectra.
            Env var: QGRAPH_ANALYSIS_SPECTRA_TOL

        conjugation_tol: Pass threshold of S-matrix conjugation reports.
            Env var: QGRAPH_ANALYSIS_CONJUGATION_TOL

        poles_tol: Pass threshold of compare_poles.
            Env var: QGRAPH_ANALYSIS_POLES_TOL

        transplant_tol: Pass threshold of transplanted eigenfunction residuals.
            Env var: QGRAPH_ANALYSIS_TRANSPLANT_TOL

        transplant_samples: Sample points per edge used to fit transplanted edge coefficients.
            Env var: QGRAPH_ANALYSIS_TRANSPLANT_SAMPLES
    """

    spectra_tol: float = field(default=1e-8, metadata={"env": "QGRAPH_ANALYSIS_SPECTRA_TOL"})
    conjugation_tol: float = field(default=1e-9, metadata={"env": "QGRAPH_ANALYSIS_CONJUGATION_TOL"})
    poles_tol: float = field(default=1e-6, metadata={"env": "QGRAPH_ANALYSIS_POLES_TOL"})
    transplant_tol: float = field(default=1e-8, metadata={"env": "QGRAPH_ANALYSIS_TRANSPLANT_TOL"})
    transplant_samples: int = field(default=9, metadata={"env": "QGRAPH_ANALYSIS_TRANSPLANT_SAMPLES"})

    def validate(self) -> Self:
        """Validate analysis configuration fields."""
        _require_positive("analysis", "spectra_tol", self.spectra_tol)
        _require_positive("analysis", "conjugation_tol", self.conjugation_tol)
        _require_positive("analysis", "poles_tol", self.poles_tol)
        _require_positive("analysis", "transplant_tol", self.transplant_tol)
        if self.transplant_samples < 3:
            raise ConfigValidationError(
                "transplant_samples", self.transplant_samples,
                "Must be >= 3.", section="analysis"
            )
        return self


@dataclass(frozen=True)
class RuntimeConfig(OverridableConfig):
    """
    Execution settings shared by all operations.

    Attributes:
        jobs: Worker threads for grid and contour evaluations. Results never depend on it.
            Env var: QGRAPH_JOBS

        strict_io: Reject unknown keys in graph and symmetry files.
            Env var: QGRAPH_RUNTIME_STRICT_IO
    """

    jobs: int = field(default_factory=lambda: os.cpu_count() or 1, metadata={"env": "QGRAPH_JOBS"})
    strict_io: bool = field(default=True, metadata={"env": "QGRAPH_RUNTIME_STRICT_IO"})

    def validate(self) -> Self:
        """Validate runtime configuration fields."""
        if self.jobs < 1:
            raise ConfigValidationError(
                "jobs", self.jobs,
                "Must be >= 1.", section="runtime"
            )
        return self


@dataclass(frozen=True)
class ConfigEntry:
    """One row of `QGRAPH.explain()`: a field, its value and where the value came from."""

    name: str
    value: Any
    source: str

    @property
    def formatted_value(self) -> str:
        text = str(self.value)
        return text if len(text) <= 50 else f"{text[:47]}..."


@dataclass(frozen=True)
class QGRAPHConfigTracker:
    """
    Origin of every non-default field, keyed section -> field -> source.

    A source is "user" for QGRAPH.configure() values and "env:<VAR>" for
    environment variables. Fields never touched read as "default".
    """

    sources: Mapping[str, Mapping[str, str]] = field(default_factory=dict)

    def recorded(self, section: str, origins: Mapping[str, str]) -> QGRAPHConfigTracker:
        """Return a tracker with `origins` layered over the section's current entries."""
        if not origins:
            return self
        merged = {name: dict(entries) for name, entries in self.sources.items()}
        merged.setdefault(section, {}).update(origins)
        return QGRAPHConfigTracker(sources=merged)

    def source_of(self, section: str, name: str) -> str:
        return self.sources.get(section, {}).get(name, "default")


@dataclass(frozen=True)
class QGRAPHConfig:
    """
    The resolved configuration: library metadata plus the four tunable sections.

    Example:
        >>> from qgraph import QGRAPH
        >>> QGRAPH.config.scattering.contour_points
        64
    """

    library: LibraryConfig = field(default_factory=LibraryConfig.detect)
    spectral: SpectralConfig = field(default_factory=SpectralConfig)
    scattering: ScatteringConfig = field(default_factory=ScatteringConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    runtime: RuntimeConfig = field(default_factory=RuntimeConfig)
    _tracker: QGRAPHConfigTracker = field(default_factory=QGRAPHConfigTracker, repr=False)

    def _sections(self) -> dict[str, OverridableConfig]:
        return {name: getattr(self, name) for name in _SECTIONS}

    def with_env_vars(self) -> QGRAPHConfig:
        """Apply every QGRAPH_* environment variable that is set."""
        tracker = self._tracker
        updated: dict[str, Any] = {}
        for name, section in self._sections().items():
            found = section.env_overrides()
            updated[name] = section.with_overrides({f: value for f, (_, value) in found.items()})
            tracker = tracker.recorded(name, {f: f"env:{var}" for f, (var, _) in found.items()})
        return replace(self, _tracker=tracker, **updated)

    def with_section_overrides(
        self,
        *,
        spectral: Mapping[str, Any] | None = None,
        scattering: Mapping[str, Any] | None = None,
        analysis: Mapping[str, Any] | None = None,
        runtime: Mapping[str, Any] | None = None,
    ) -> QGRAPHConfig:
        """
        Apply user overrides per section.

        A field named here is attributed to "user" even when the value equals its default.

        Example:
            >>> QGRAPHConfig().with_section_overrides(spectral={"k_tol": 1e-12}, runtime={"jobs": 1})
        """
        requested = {"spectral": spectral, "scattering": scattering, "analysis": analysis, "runtime": runtime}
        tracker = self._tracker
        updated: dict[str, Any] = {}
        for name, section in self._sections().items():
            overrides = requested[name] or {}
            updated[name] = section.with_overrides(overrides)
            tracker = tracker.recorded(name, {f: "user" for f in overrides})
        return replace(self, _tracker=tracker, **updated)

    def explain_data(self) -> dict[str, list[ConfigEntry]]:
        """Rows of `QGRAPH.explain()`, library first; library fields have source "-"."""
        data = {"library": [ConfigEntry(f.name, getattr(self.library, f.name), "-") for f in fields(self.library)]}
        for name, section in self._sections().items():
            data[name] = [
                ConfigEntry(f.name, getattr(section, f.name), self._tracker.source_of(name, f.name))
                for f in fields(section)
            ]
        return data

    def tolerances(self) -> dict[str, Any]:
        """Flatten the numerical sections into "section.field" keys for run manifests."""
        return {
            f"{name}.{f.name}": getattr(getattr(self, name), f.name)
            for name in _NUMERICAL_SECTIONS
            for f in fields(getattr(self, name))
        }


class _QGRAPH:
    """Holder of the process-wide configuration, exposed as `QGRAPH`."""

    def __init__(self) -> None:
        self._config: QGRAPHConfig = QGRAPHConfig().with_env_vars()

    @property
    def config(self) -> QGRAPHConfig:
        return self._config

    def configure(
        self,
        *,
        spectral: Mapping[str, Any] | None = None,
        scattering: Mapping[str, Any] | None = None,
        analysis: Mapping[str, Any] | None = None,
        runtime: Mapping[str, Any] | None = None,
        allow_env_override: bool = True,
    ) -> QGRAPHConfig:
        """
        Replace the configuration with defaults, env vars and the given overrides.

        Earlier configure() calls are discarded. With allow_env_override=False the
        QGRAPH_* variables are ignored.

        Raises:
            ValueError: An override names an unknown field.
            ConfigValidationError: A resolved value is out of range.
        """
        base = QGRAPHConfig()
        if allow_env_override:
            base = base.with_env_vars()
        self._config = base.with_section_overrides(
            spectral=spectral, scattering=scattering, analysis=analysis, runtime=runtime
        )
        return self.validate()

    def reset(self) -> QGRAPHConfig:
        """Back to defaults plus environment variables."""
        self._config = QGRAPHConfig().with_env_vars()
        return self.validate()

    def validate(self) -> QGRAPHConfig:
        for name in _SECTIONS:
            getattr(self._config, name).validate()
        return self._config

    def explain(self, output: Callable[[str], None] = print) -> None:
        """
        Write the resolved configuration, one field per line, to `output`.

        Overridden fields carry a ✎ before their source. Pass `logger.info` to log instead of print.
        """
        rows = self._config.explain_data()
        width = max(len(entry.name) for entries in rows.values() for entry in entries) + 2
        output("QGRAPH Configuration:")
        for section, entries in rows.items():
            output(f"[{section}]")
            for entry in entries:
                marker = " " if entry.source in ("default", "-") else "✎"
                output(f"  {entry.name.ljust(width, '.')} {entry.formatted_value:<24} {marker} {entry.source}")

    def __repr__(self) -> str:
        return f"QGRAPH(config={self._config!r})"


QGRAPH: _QGRAPH = _QGRAPH()
QGRAPH.validate()
