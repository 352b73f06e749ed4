"""Tests for the qgraph command line."""

import io
import json
import math
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest.mock import patch

from ulid import ULID

from qgraph._cli import EXIT_FAIL, EXIT_INPUT_ERROR, EXIT_NUMERICAL_ERROR, EXIT_OK, main
from qgraph._config import QGRAPH
from qgraph._errors import ContourError
from qgraph.graphs import Edge, MetricGraph, Vertex, VertexCondition, attach_leads, serialize_graph

D = VertexCondition.DIRICHLET
POLE = complex(math.pi / 2, -0.5 * math.log(3.0))


def run(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


class CLITestCase(unittest.TestCase):
    """Base class: temporary directory, fixed SOURCE_DATE_EPOCH and a clean configuration."""

    def setUp(self):
        QGRAPH.reset()
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.env = patch.dict("os.environ", {"SOURCE_DATE_EPOCH": "1700000000"})
        self.env.start()

    def tearDown(self):
        self.env.stop()
        self.tmp.cleanup()
        QGRAPH.reset()

    def write_interval(self, name: str, length: float = 1.0) -> str:
        graph = MetricGraph(vertices=(Vertex("u", D), Vertex("v", D)), edges=(Edge("e", "u", "v", length),))
        path = self.dir / name
        serialize_graph(graph, path)
        return str(path)

    def write_lead_graph(self, name: str = "lead.json") -> str:
        graph = MetricGraph(
            vertices=(Vertex("c"), Vertex("t1", D), Vertex("t2", D)),
            edges=(Edge("e1", "c", "t1", 1.0), Edge("e2", "c", "t2", 1.0)),
        )
        path = self.dir / name
        serialize_graph(attach_leads(graph, ["c"]), path)
        return str(path)


class TestManifest(CLITestCase):
    """Tests for the '#' manifest block."""

    def test_spectrum_manifest(self):
        path = self.write_interval("interval.json")
        code, out, _ = run("spectrum", path, "--kmin", "0.1", "--kmax", "10")
        self.assertEqual(code, EXIT_OK)
        header = [line[2:] for line in out.splitlines() if line.startswith("# ")]
        self.assertEqual(header[0], f"command: qgraph spectrum {path} --kmin 0.1 --kmax 10")
        self.assertTrue(header[1].startswith(f"input: {path} sha256="))
        self.assertIn("timestamp: 2023-11-14T22:13:20Z", header)
        self.assertTrue(any(line.startswith("version: qgraph ") for line in header))
        self.assertTrue(any(line.startswith("tolerances: {") for line in header))
        rows = [line for line in out.splitlines() if not line.startswith("#")]
        self.assertEqual(rows[0], "k,multiplicity")
        self.assertEqual(len(rows), 4)

    def test_run_id_is_a_reproducible_ulid(self):
        path = self.write_interval("interval.json")
        _, first, _ = run("spectrum", path, "--kmin", "0.1", "--kmax", "10")
        _, second, _ = run("spectrum", path, "--kmin", "0.1", "--kmax", "10")
        self.assertEqual(first, second)
        [run_id] = [line.split(": ", 1)[1] for line in first.splitlines() if line.startswith("# run_id: ")]
        ulid = ULID.from_str(run_id)
        self.assertEqual(int(ulid.timestamp), 1700000000)

    def test_output_options_do_not_change_the_run(self):
        path = self.write_interval("interval.json")
        out_path = self.dir / "spectrum.csv"
        code, stdout, _ = run("--jobs", "2", "spectrum", path, "--kmin", "0.1", "--kmax", "10", "--out", str(out_path))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(stdout, "")
        _, reference, _ = run("spectrum", path, "--kmin", "0.1", "--kmax", "10")
        self.assertEqual(out_path.read_text(), reference)

    def test_jobs_after_the_subcommand(self):
        path = self.write_interval("interval.json")
        code, out, _ = run("spectrum", path, "--kmin", "0.1", "--kmax", "10", "--jobs", "2")
        self.assertEqual(code, EXIT_OK)
        _, reference, _ = run("spectrum", path, "--kmin", "0.1", "--kmax", "10")
        self.assertEqual(out, reference)

    def test_builtin_inputs_are_hashed(self):
        code, out, _ = run("smatrix", "--builtin", "d4-r1-leads", "--k", "1.3,0")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("# input: builtin:d4-r1-leads sha256=", out)
        self.assertIn("row,col,re,im", out)


class TestCommands(CLITestCase):
    """Tests for the individual commands and their exit codes."""

    def test_compare_builtin_spectra_passes(self):
        code, out, _ = run("compare", "--builtin", "d4-r1", "--builtin2", "d4-r2",
                           "--mode", "spectra", "--kmin", "0.1", "--kmax", "6")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("PASS: spectra comparison", out)

    def test_compare_builtin_smatrix_passes(self):
        code, out, _ = run("compare", "--builtin", "d4-r1-leads", "--builtin2", "d4-r2-leads",
                           "--mode", "smatrix", "--kmin", "0.5", "--kmax", "3", "--kstep", "0.5", "--format", "json")
        self.assertEqual(code, EXIT_OK)
        body = "\n".join(line for line in out.splitlines() if not line.startswith("#"))
        report = json.loads(body)
        self.assertEqual(report["verdict"], "PASS")
        self.assertEqual(report["count"], 6)

    def test_compare_failure_exits_one(self):
        first = self.write_interval("a.json", 1.0)
        second = self.write_interval("b.json", 1.01)
        pairs = self.dir / "pairs.csv"
        code, out, _ = run("compare", first, second, "--mode", "spectra", "--pairs-csv", str(pairs))
        self.assertEqual(code, EXIT_FAIL)
        self.assertTrue(out.startswith("# command: qgraph compare"))
        self.assertIn("FAIL", out)
        self.assertIn("label,left_re,left_im,right_re,right_im,deviation", pairs.read_text())

    def test_compare_file_against_builtin(self):
        path = self.write_interval("a.json")
        code, out, _ = run("compare", path, "--builtin2", "d4-r1", "--mode", "spectra", "--kmax", "2")
        self.assertIn(code, (EXIT_OK, EXIT_FAIL))
        self.assertIn(f"# input: {path} sha256=", out)
        self.assertIn("# input: builtin:d4-r1 sha256=", out)

    def test_smatrix_compare_needs_transplantation(self):
        path = self.write_lead_graph()
        code, _, err = run("compare", path, path, "--mode", "smatrix")
        self.assertEqual(code, EXIT_INPUT_ERROR)
        self.assertIn("--transplantation", err)

    def test_transplantation_file(self):
        path = self.write_lead_graph()
        t_path = self.dir / "t.json"
        t_path.write_text('{"matrix": [[2.0]]}\n')
        code, out, _ = run("compare", path, path, "--mode", "smatrix", "--transplantation", str(t_path),
                           "--kmin", "0.5", "--kmax", "1.5", "--kstep", "0.5")
        self.assertEqual(code, EXIT_OK)
        self.assertIn(f"# input: {t_path} sha256=", out)

    def test_poles(self):
        path = self.write_lead_graph()
        code, out, _ = run("poles", path, "--rect=0.5,7,-2,-0.01")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("# winding: 2", out)
        rows = [line for line in out.splitlines() if not line.startswith("#")]
        self.assertEqual(rows[0], "re_k,im_k,sigma_min")
        self.assertAlmostEqual(float(rows[1].split(",")[0]), POLE.real, places=8)

    def test_quotient_of_builtin_parent(self):
        provenance = self.dir / "provenance.json"
        code, out, _ = run("quotient", "--builtin", "d4-parent", "--rep", "R2", "--provenance", str(provenance))
        self.assertEqual(code, EXIT_OK)
        body = json.loads("\n".join(line for line in out.splitlines() if not line.startswith("#")))
        self.assertEqual([v["id"] for v in body["vertices"]], ["O", "X+", "Y+", "U+", "M1", "M3"])
        self.assertEqual(json.loads(provenance.read_text())["rep"]["name"], "R2")

    def test_quotient_with_unknown_builtin_rep(self):
        code, _, err = run("quotient", "--builtin", "d4-parent", "--rep", "R3")
        self.assertEqual(code, EXIT_INPUT_ERROR)
        self.assertIn("R3", err)

    def test_config(self):
        code, out, _ = run("config")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("k_tol", out)


class TestExitCodes(CLITestCase):
    """Tests for input and numerical error exit codes."""

    def test_missing_file(self):
        code, _, err = run("spectrum", str(self.dir / "missing.json"), "--kmin", "0.1", "--kmax", "1")
        self.assertEqual(code, EXIT_INPUT_ERROR)
        self.assertIn("cannot read file", err)

    def test_malformed_file(self):
        path = self.dir / "bad.json"
        path.write_text("{\"vertices\": [}\n")
        code, _, err = run("spectrum", str(path), "--kmin", "0.1", "--kmax", "1")
        self.assertEqual(code, EXIT_INPUT_ERROR)
        self.assertIn("line 1", err)

    def test_bad_arguments(self):
        code, _, _ = run("spectrum", "--kmin", "0.1")
        self.assertEqual(code, EXIT_INPUT_ERROR)

    def test_bad_wavenumber(self):
        code, _, err = run("smatrix", "--builtin", "d4-r1-leads", "--k", "a,b")
        self.assertEqual(code, EXIT_INPUT_ERROR)
        self.assertIn("re,im", err)

    def test_pole_proximity(self):
        path = self.write_lead_graph()
        code, _, err = run("smatrix", path, f"--k={POLE.real!r},{POLE.imag!r}")
        self.assertEqual(code, EXIT_NUMERICAL_ERROR)
        self.assertIn("numerical error", err)

    def test_unwritable_output_is_an_input_error(self):
        path = self.write_interval("interval.json")
        out_path = self.dir / "missing-dir" / "spectrum.csv"
        code, _, err = run("spectrum", path, "--kmin", "0.1", "--kmax", "5", "--out", str(out_path))
        self.assertEqual(code, EXIT_INPUT_ERROR)
        self.assertIn("qgraph: error:", err)
        self.assertNotIn("Traceback", err)

    def test_undecodable_file(self):
        path = self.dir / "binary.json"
        path.write_bytes(b"{\"vertices\": [], \"x\": \"\xff\xfe\"}\n")
        code, _, err = run("spectrum", str(path), "--kmin", "0.1", "--kmax", "1")
        self.assertEqual(code, EXIT_INPUT_ERROR)
        self.assertIn(str(path), err)

    def test_resonance_search_gives_up(self):
        path = self.write_lead_graph()
        with patch("qgraph.scattering._resonances._ResonanceSearch.run",
                   side_effect=ContourError("too close to a zero")):
            code, _, err = run("poles", path, "--rect=0.5,7,-2,-0.01")
        self.assertEqual(code, EXIT_NUMERICAL_ERROR)
        self.assertIn("numerical error", err)


if __name__ == "__main__":
    unittest.main()
