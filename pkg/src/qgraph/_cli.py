"""
Command-line entry point.

    qgraph spectrum GRAPH --kmin 0.1 --kmax 10
    qgraph smatrix --builtin d4-r1-leads --k 1.3,0
    qgraph poles GRAPH --rect=0.5,7,-2,-0.01
    qgraph quotient GRAPH SYMMETRY --rep odd --out quotient.json
    qgraph compare --builtin d4-r1-leads --builtin2 d4-r2-leads --mode smatrix
    qgraph config

Every output starts with a '#' manifest block (command, input hashes,
tolerances, timestamp, version, run id). With SOURCE_DATE_EPOCH set, identical
inputs reproduce every output byte for byte.

Exit codes: 0 success or PASS, 1 comparison FAIL, 2 input error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from collections.abc import Sequence
from dataclasses import dataclass
from datetime import UTC, datetime
from pathlib import Path

import numpy as np
from ulid import ULID

from qgraph._config import QGRAPH
from qgraph._errors import AnalysisError, NumericalError
from qgraph._retry import MaxRetriesExceededError
from qgraph._utils import render_json, save_text_file, sha256_file
from qgraph.analysis import (
    JsonReportFormatter,
    TextReportFormatter,
    Transplantation,
    compare_poles,
    compare_spectra,
    conjugation_report,
)
from qgraph.graphs import ExtendedGraph, graph_hash, load_graph, render_graph
from qgraph.scattering import Rectangle, ResonanceOptions, resonances, smatrix
from qgraph.spectral import SpectrumOptions, spectrum
from qgraph.symmetry import (
    BUILTIN_NAMES,
    BUILTIN_T,
    builtin_d4_example,
    builtin_graph,
    d4_reps,
    load_symmetry,
    quotient,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL_ERROR = 3

_LEADS_PAIR = {"d4-r1-leads", "d4-r2-leads"}
_VOLATILE_OPTIONS = {"--out", "--jobs", "--pairs-csv", "--provenance"}


# =============================================================================
# Manifest
# =============================================================================


@dataclass(frozen=True)
class RunManifest:
    """
    Provenance written at the top of every output.

    Attributes:
        command: Canonical command line (output paths and --jobs removed).
        inputs: (label, sha256) per input.
        tolerances: Flattened numerical configuration.
        timestamp: SOURCE_DATE_EPOCH when set, else the current time (UTC).
        version: Library version.
    """
    command: str
    inputs: tuple[tuple[str, str], ...]
    tolerances: dict[str, object]
    timestamp: datetime
    version: str

    @property
    def run_id(self) -> str:
        """ULID: timestamp in the time part, sha256 of command and inputs in the random part."""
        millis = int(self.timestamp.timestamp() * 1000)
        digest = hashlib.sha256(
            json.dumps([self.command, list(self.inputs)], separators=(",", ":")).encode("utf-8")
        ).digest()
        return str(ULID.from_bytes(millis.to_bytes(6, "big") + digest[:10]))

    def lines(self) -> tuple[str, ...]:
        lines = [f"command: {self.command}"]
        lines.extend(f"input: {label} sha256={digest}" for label, digest in self.inputs)
        lines.append(f"tolerances: {json.dumps(self.tolerances, sort_keys=True, separators=(',', ':'))}")
        lines.append(f"timestamp: {self.timestamp.strftime('%Y-%m-%dT%H:%M:%SZ')}")
        lines.append(f"version: qgraph {self.version}")
        lines.append(f"run_id: {self.run_id}")
        return tuple(lines)


def _timestamp() -> datetime:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        try:
            return datetime.fromtimestamp(int(epoch), tz=UTC)
        except ValueError:
            raise ValueError(f"SOURCE_DATE_EPOCH must be an integer, got {epoch!r}") from None
    return datetime.now(tz=UTC)


def _canonical_command(argv: Sequence[str]) -> str:
    parts: list[str] = []
    skip = False
    for token in argv:
        if skip:
            skip = False
            continue
        name = token.split("=", 1)[0]
        if name in _VOLATILE_OPTIONS or token in ("-v", "--verbose"):
            skip = "=" not in token and name in _VOLATILE_OPTIONS
            continue
        parts.append(token)
    return " ".join(["qgraph", *parts])


class _Inputs:
    """Collects hashed inputs for the manifest."""

    def __init__(self) -> None:
        self.items: list[tuple[str, str]] = []

    def graph(self, path: str | None, builtin: str | None) -> ExtendedGraph:
        if builtin is not None:
            eg = builtin_graph(builtin)
            self.items.append((f"builtin:{builtin}", graph_hash(eg)))
            return eg
        if path is None:
            raise ValueError("give a graph file or --builtin")
        eg = load_graph(path)
        self.items.append((path, sha256_file(Path(path))))
        return eg

    def file(self, path: str) -> None:
        self.items.append((path, sha256_file(Path(path))))

    def manifest(self, argv: Sequence[str]) -> RunManifest:
        cfg = QGRAPH.config
        return RunManifest(
            command=_canonical_command(argv),
            inputs=tuple(self.items),
            tolerances=cfg.tolerances(),
            timestamp=_timestamp(),
            version=cfg.library.version,
        )


def _emit(text: str, out: str | None) -> None:
    if out:
        save_text_file(text, Path(out))
    else:
        sys.stdout.write(text)


# =============================================================================
# Argument parsing helpers
# =============================================================================


def _parse_complex(text: str) -> complex:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (1, 2):
        raise ValueError(f"expected re,im, got {text!r}")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ValueError(f"k must be given as numbers re,im, got {text!r}") from None
    return complex(values[0], values[1] if len(values) == 2 else 0.0)


def _grid(k_min: float, k_max: float, step: float, imag: float) -> list[complex]:
    if not (0 < k_min <= k_max and step > 0):
        raise ValueError(f"k-grid needs 0 < kmin <= kmax and kstep > 0, got {k_min}, {k_max}, {step}")
    count = int(round((k_max - k_min) / step)) + 1
    return [complex(k, imag) for k in np.linspace(k_min, k_min + (count - 1) * step, count)]


# =============================================================================
# Commands
# =============================================================================


def _cmd_spectrum(args: argparse.Namespace, argv: Sequence[str]) -> int:
    inputs = _Inputs()
    eg = inputs.graph(args.graph, args.builtin)
    result = spectrum(eg.compact(), args.kmin, args.kmax, SpectrumOptions(k_tol=args.tol, jobs=args.jobs))
    _emit(result.render_csv(inputs.manifest(argv).lines()), args.out)
    return EXIT_OK


def _cmd_smatrix(args: argparse.Namespace, argv: Sequence[str]) -> int:
    inputs = _Inputs()
    eg = inputs.graph(args.graph, args.builtin)
    result = smatrix(eg, _parse_complex(args.k))
    header = inputs.manifest(argv).lines() + tuple(f"warning: {w}" for w in result.warnings)
    _emit(result.render_csv(header), args.out)
    return EXIT_OK


def _cmd_poles(args: argparse.Namespace, argv: Sequence[str]) -> int:
    inputs = _Inputs()
    eg = inputs.graph(args.graph, args.builtin)
    rect = Rectangle.parse(args.rect)
    result = resonances(eg, rect, ResonanceOptions(newton_k_tol=args.tol, jobs=args.jobs))
    header = inputs.manifest(argv).lines() + (f"winding: {result.winding}",)
    _emit(result.render_csv(header + tuple(f"warning: {w}" for w in result.warnings)), args.out)
    return EXIT_OK


def _cmd_quotient(args: argparse.Namespace, argv: Sequence[str]) -> int:
    inputs = _Inputs()
    parent = inputs.graph(args.graph, args.builtin)
    if args.symmetry is not None:
        description = load_symmetry(args.symmetry)
        inputs.file(args.symmetry)
        action, rep = description.action, description.rep(args.rep)
    elif args.builtin in ("d4-parent", "d4-parent-leads"):
        action = builtin_d4_example().action
        reps = d4_reps(action.group)
        if args.rep not in reps:
            raise ValueError(f"built-in representations are {sorted(reps)}, got {args.rep!r}")
        rep = reps[args.rep]
    else:
        raise ValueError("give a symmetry file, or use --builtin d4-parent with --rep R1, R2 or identity")

    result = quotient(parent, action, rep)
    _emit(render_graph(result.quotient, inputs.manifest(argv).lines()), args.out)
    if args.provenance:
        save_text_file(render_json(result.provenance()), Path(args.provenance))
    return EXIT_OK


def _transplantation(args: argparse.Namespace, inputs: _Inputs, n_leads: int) -> Transplantation:
    if args.transplantation:
        transplantation = Transplantation.load(args.transplantation)
        inputs.file(args.transplantation)
        return transplantation
    if {args.builtin, args.builtin2} == _LEADS_PAIR:
        return Transplantation(BUILTIN_T)
    if n_leads == 0:
        return Transplantation.identity(0)
    raise AnalysisError("--mode smatrix needs --transplantation FILE (built-in T applies to d4-r1-leads/d4-r2-leads)")


def _cmd_compare(args: argparse.Namespace, argv: Sequence[str]) -> int:
    inputs = _Inputs()
    first = inputs.graph(args.graph1, args.builtin)
    second = inputs.graph(args.graph2, args.builtin2)

    if args.mode == "spectra":
        opts = SpectrumOptions(jobs=args.jobs)
        report = compare_spectra(
            spectrum(first.compact(), args.kmin, args.kmax, opts),
            spectrum(second.compact(), args.kmin, args.kmax, opts),
            args.tol,
        )
    elif args.mode == "smatrix":
        T = _transplantation(args, inputs, len(first.leads))
        grid = _grid(args.kmin, args.kmax, args.kstep, args.kimag)
        report = conjugation_report(first, second, T, grid, tol=args.tol, jobs=args.jobs)
    else:
        if args.rect is None:
            raise ValueError("--mode poles needs --rect re_min,re_max,im_min,im_max")
        rect = Rectangle.parse(args.rect)
        opts = ResonanceOptions(jobs=args.jobs)
        report = compare_poles(resonances(first, rect, opts), resonances(second, rect, opts), args.tol)

    header = inputs.manifest(argv).lines()
    formatter = JsonReportFormatter() if args.format == "json" else TextReportFormatter()
    _emit(formatter.format(report, header), args.out)
    if args.pairs_csv:
        report.write_pairs_csv(args.pairs_csv, header)
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_config(args: argparse.Namespace, argv: Sequence[str]) -> int:
    QGRAPH.explain()
    return EXIT_OK


# =============================================================================
# Parser
# =============================================================================


def _add_graph_source(parser: argparse.ArgumentParser, positional: str = "graph") -> None:
    parser.add_argument(positional, nargs="?", help="graph description file (JSON)")
    parser.add_argument("--builtin", choices=BUILTIN_NAMES, help="use a built-in graph instead of a file")


_JOBS_HELP = "worker threads (default: QGRAPH_JOBS or the number of cores)"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgraph",
        description="Spectra, scattering matrices and isospectral quotients of metric quantum graphs.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log INFO (-v) or DEBUG (-vv)")
    parser.add_argument("--jobs", type=int, default=None, help=_JOBS_HELP)
    # SUPPRESS keeps a top-level --jobs when the subcommand does not repeat it
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help=_JOBS_HELP)
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("spectrum", parents=[shared], help="eigenvalues of a compact graph as CSV")
    _add_graph_source(p)
    p.add_argument("--kmin", type=float, required=True)
    p.add_argument("--kmax", type=float, required=True)
    p.add_argument("--tol", type=float, default=None, help="eigenvalue tolerance")
    p.add_argument("--out", help="output file (default: standard output)")
    p.set_defaults(handler=_cmd_spectrum)

    p = commands.add_parser("smatrix", parents=[shared], help="scattering matrix at one k as CSV")
    _add_graph_source(p)
    p.add_argument("--k", required=True, help="wavenumber re,im (use --k=-1,0 for a leading minus)")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_smatrix)

    p = commands.add_parser("poles", parents=[shared], help="resonances inside a rectangle as CSV")
    _add_graph_source(p)
    p.add_argument("--rect", required=True, help="re_min,re_max,im_min,im_max with im_max < 0")
    p.add_argument("--tol", type=float, default=None, help="Newton step tolerance")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_poles)

    p = commands.add_parser("quotient", parents=[shared], help="quotient graph by a +-1 representation")
    _add_graph_source(p)
    p.add_argument("symmetry", nargs="?", help="symmetry description file (JSON)")
    p.add_argument("--rep", default=None, help="representation name")
    p.add_argument("--out")
    p.add_argument("--provenance", help="also write the quotient provenance as JSON")
    p.set_defaults(handler=_cmd_quotient)

    p = commands.add_parser("compare", parents=[shared], help="compare two graphs (PASS exits 0, FAIL exits 1)")
    p.add_argument("graph1", nargs="?")
    p.add_argument("graph2", nargs="?")
    p.add_argument("--builtin", choices=BUILTIN_NAMES, help="built-in first graph")
    p.add_argument("--builtin2", choices=BUILTIN_NAMES, help="built-in second graph")
    p.add_argument("--mode", choices=("spectra", "smatrix", "poles"), required=True)
    p.add_argument("--transplantation", help="lead-space transplantation file (JSON)")
    p.add_argument("--kmin", type=float, default=0.1)
    p.add_argument("--kmax", type=float, default=10.0)
    p.add_argument("--kstep", type=float, default=0.1)
    p.add_argument("--kimag", type=float, default=0.0, help="imaginary part of the smatrix k-grid")
    p.add_argument("--rect", help="re_min,re_max,im_min,im_max for --mode poles")
    p.add_argument("--tol", type=float, default=None, help="pass threshold")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    p.add_argument("--pairs-csv", help="also write the compared pairs as CSV")
    p.set_defaults(handler=_cmd_compare)

    p = commands.add_parser("config", help="show the configuration and where each value comes from")
    p.set_defaults(handler=_cmd_config)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%H:%M:%S",
        stream=sys.stderr,
    )


def _fix_positionals(args: argparse.Namespace) -> None:
    """A single positional with --builtin is the symmetry file (quotient) or the second graph (compare)."""
    if args.command == "quotient" and args.builtin and args.graph and not args.symmetry:
        args.symmetry, args.graph = args.graph, None
    if args.command == "compare":
        files = [f for f in (args.graph1, args.graph2) if f]
        if args.builtin and args.builtin2:
            args.graph1 = args.graph2 = None
        elif args.builtin:
            args.graph1, args.graph2 = None, files[0] if files else None
        elif args.builtin2:
            args.graph1, args.graph2 = files[0] if files else None, None


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line; returns the exit code."""
    arguments = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(arguments)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_INPUT_ERROR
    _configure_logging(args.verbose)
    _fix_positionals(args)

    try:
        return int(args.handler(args, arguments))
    except (NumericalError, MaxRetriesExceededError) as e:
        print(f"qgraph: numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL_ERROR
    except (ValueError, RuntimeError, OSError) as e:
        # RuntimeError here is a failed write from save_text_file
        print(f"qgraph: error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
