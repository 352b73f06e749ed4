"""Tests for internal utilities."""

import csv
import io
import json
import tempfile
import threading
import unittest
from pathlib import Path

from qgraph._utils import (
    comment_block,
    format_float,
    map_in_order,
    render_csv,
    render_json,
    save_text_file,
    sha256_bytes,
    sha256_file,
    strip_comment_lines,
)


class TestCommentLines(unittest.TestCase):
    """Tests for comment_block() and strip_comment_lines()."""

    def test_comment_block_prefixes_lines(self):
        self.assertEqual(comment_block(["command: spectrum", "run_id: X"]), "# command: spectrum\n# run_id: X\n")

    def test_comment_block_empty(self):
        self.assertEqual(comment_block([]), "")

    def test_strip_counts_removed_lines(self):
        body, skipped = strip_comment_lines("# a\n# b\n{\"x\": 1}\n# not leading\n")
        self.assertEqual(skipped, 2)
        self.assertEqual(body, "{\"x\": 1}\n# not leading\n")


class TestRenderers(unittest.TestCase):
    """Tests for render_csv() and render_json()."""

    def test_csv_floats_round_trip(self):
        """Should write floats with enough digits to recover the exact double."""
        value = 0.1 + 0.2
        text = render_csv(["k"], [(value,)], header=["command: spectrum"])
        body, skipped = strip_comment_lines(text)
        rows = list(csv.reader(io.StringIO(body)))
        self.assertEqual(skipped, 1)
        self.assertEqual(rows[0], ["k"])
        self.assertEqual(float(rows[1][0]), value)

    def test_csv_keeps_non_floats(self):
        text = render_csv(["index", "label"], [(1, "a")])
        self.assertEqual(text, "index,label\n1,a\n")

    def test_format_float_uses_dot(self):
        self.assertEqual(format_float(1.5), "1.5")

    def test_json_with_header(self):
        text = render_json({"verdict": "PASS"}, header=["version: qgraph 0.1.0"])
        body, _ = strip_comment_lines(text)
        self.assertTrue(text.startswith("# version: qgraph 0.1.0\n"))
        self.assertEqual(json.loads(body), {"verdict": "PASS"})


class TestFiles(unittest.TestCase):
    """Tests for save_text_file() and the sha256 helpers."""

    def test_save_and_hash(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "out.csv"
            save_text_file("k\n3.14\n", path)
            self.assertEqual(path.read_text(encoding="utf-8"), "k\n3.14\n")
            self.assertEqual(sha256_file(path), sha256_bytes(b"k\n3.14\n"))

    def test_save_to_missing_directory_raises_runtime_error(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(RuntimeError):
                save_text_file("x", Path(tmp) / "missing" / "out.csv")


class TestMapInOrder(unittest.TestCase):
    """Tests for map_in_order()."""

    def test_sequential(self):
        self.assertEqual(map_in_order(lambda k: k * k, [1.0, 2.0, 3.0]), [1.0, 4.0, 9.0])

    def test_parallel_keeps_order(self):
        """Should return results in input order regardless of completion order."""
        barrier = threading.Barrier(2)

        def work(n: int) -> int:
            if n < 2:
                barrier.wait(timeout=5)
            return n * 10

        self.assertEqual(map_in_order(work, [0, 1, 2, 3], max_workers=2), [0, 10, 20, 30])

    def test_parallel_reraises_first_error(self):
        def work(n: int) -> int:
            if n == 2:
                raise ValueError("bad item")
            return n

        with self.assertRaises(ValueError):
            map_in_order(work, [1, 2, 3], max_workers=3)


if __name__ == "__main__":
    unittest.main()
