"""
Internal helpers shared by the qgraph modules.

Writers for JSON/CSV artifacts (with '#' manifest comment lines), file hashing,
and an order-preserving parallel map. Not part of the public API.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path
from typing import Any

from qgraph._errors import GraphParseError

logger = logging.getLogger(__name__)


def format_float(value: float) -> str:
    """Format a float with 17 significant digits (round-trip safe for doubles)."""
    return f"{float(value):.17g}"


def comment_block(lines: Iterable[str]) -> str:
    """Render lines as a '#'-prefixed comment block (empty string for no lines)."""
    return "".join(f"# {line}\n" for line in lines)


def strip_comment_lines(text: str) -> tuple[str, int]:
    """
    Remove leading '#' comment lines from a text document.

    Returns:
        The remaining text and the number of lines removed (for error positions).
    """
    lines = text.splitlines(keepends=True)
    skipped = 0
    for line in lines:
        if not line.lstrip().startswith("#"):
            break
        skipped += 1
    return "".join(lines[skipped:]), skipped


def render_json(data: dict[str, Any], header: Sequence[str] = ()) -> str:
    """Render data as indented JSON preceded by an optional comment block."""
    body = json.dumps(data, indent=4, ensure_ascii=False, default=str)
    return comment_block(header) + body + "\n"


def render_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]], header: Sequence[str] = ()) -> str:
    """
    Render rows as CSV preceded by an optional comment block.

    Floats are written with 17 significant digits and '.' as decimal separator.
    """
    buffer = io.StringIO()
    buffer.write(comment_block(header))
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


def read_text_file(file_path: Path) -> str:
    """
    Read a UTF-8 input file.

    Raises:
        GraphParseError: If the file cannot be read or is not UTF-8, with the path in the message.
    """
    try:
        return file_path.read_text(encoding="utf-8")
    except OSError as e:
        raise GraphParseError(f"cannot read file: {e.strerror or e}", path=str(file_path)) from e
    except UnicodeDecodeError as e:
        raise GraphParseError(f"not UTF-8 text: {e.reason} at byte {e.start}", path=str(file_path)) from e


def save_text_file(text: str, file_path: Path) -> None:
    """
    Write UTF-8 text to the specified file path.

    Raises:
        RuntimeError: If the file cannot be written (wraps the original exception).
    """
    try:
        with file_path.open(mode="w", encoding="utf-8", newline="") as file:
            file.write(text)
    except Exception as e:
        logger.error(
            f"❌ Error while writing file to disk ({file_path.name}): {e}",
            exc_info=logger.isEnabledFor(logging.DEBUG)
        )
        raise RuntimeError(f"It's not possible to save the file in the disk ({file_path.name}): {e}") from e


def save_json_file(data: dict[str, Any], file_path: Path, header: Sequence[str] = ()) -> None:
    """
    Save data as JSON to the specified file path.

    Args:
        data: Dictionary to serialize as JSON.
        file_path: Destination path for the JSON file.
        header: Optional manifest lines written as leading '#' comments.

    Raises:
        RuntimeError: If the file cannot be written (wraps the original exception).

    Example:
        >>> save_json_file({"vertices": []}, Path("out/graph.json"))
    """
    save_text_file(render_json(data, header), file_path)


def sha256_bytes(data: bytes) -> str:
    """Return the hex sha256 digest of raw bytes."""
    return hashlib.sha256(data).hexdigest()


def sha256_file(file_path: Path) -> str:
    """Return the hex sha256 digest of a file's content."""
    digest = hashlib.sha256()
    with file_path.open("rb") as file:
        for chunk in iter(lambda: file.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def map_in_order[T, R](fn: Callable[[T], R], items: Sequence[T], max_workers: int = 1) -> list[R]:
    """
    Apply `fn` to every item using a thread pool and return results in input order.

    With max_workers <= 1 (or fewer than two items) the map runs sequentially.
    The first exception raised by any call is re-raised after all futures finished.

    Example:
        >>> map_in_order(lambda k: k * k, [1.0, 2.0, 3.0], max_workers=2)
        [1.0, 4.0, 9.0]
    """
    if max_workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    results_map: dict[int, R] = {}
    first_error: Exception | None = None

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        future_to_index = {
            executor.submit(fn, item): idx
            for idx, item in enumerate(items)
        }
        for future in as_completed(future_to_index):
            idx = future_to_index[future]
            try:
                results_map[idx] = future.result()
            except Exception as e:
                if first_error is None:
                    first_error = e

    if first_error is not None:
        raise first_error

    # Rebuild results list in the same order of items list
    results = [results_map[i] for i in range(len(items))]

    assert len(results) == len(items), (
        f"🌀 Sanity check | Unexpected mismatch: results(size={len(results)}) is different from items(size={len(items)})."
    )
    return results
