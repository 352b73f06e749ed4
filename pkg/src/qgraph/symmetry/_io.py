"""
Symmetry description files.

    {
        "elements": ["e", "r"],
        "table": [["e", "r"], ["r", "e"]],
        "vertex_perm": {"e": {"u": "u", "v": "v"}, "r": {"u": "v", "v": "u"}},
        "edge_perm": {"e": {"x": {"edge": "x", "reversed": false}},
                      "r": {"x": {"edge": "x", "reversed": true}}},
        "reps": {"odd": {"subgroup": ["e", "r"], "rep": {"e": 1, "r": -1}}}
    }

A single representation may be given with top-level "subgroup" and "rep" keys
instead of the "reps" block; it is named "rep".
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from qgraph._errors import GraphParseError, SymmetryError
from qgraph._utils import read_text_file, render_json, save_text_file, strip_comment_lines
from qgraph.symmetry._actions import EdgeImage, GraphAction
from qgraph.symmetry._groups import FiniteGroup, Rep1D

_TOP_LEVEL_KEYS = {"elements", "table", "vertex_perm", "edge_perm", "reps", "subgroup", "rep"}


@dataclass(frozen=True, eq=False)
class SymmetryDescription:
    """A group action together with named representations."""
    action: GraphAction
    reps: dict[str, Rep1D] = field(default_factory=dict)

    @property
    def group(self) -> FiniteGroup:
        return self.action.group

    def rep(self, name: str | None = None) -> Rep1D:
        """
        A representation by name (the only one when name is None).

        Raises:
            ValueError: Unknown name, or no name given while several representations exist.
        """
        if name is None:
            if len(self.reps) != 1:
                raise ValueError(f"choose a representation with --rep among {sorted(self.reps)}")
            return next(iter(self.reps.values()))
        if name not in self.reps:
            raise ValueError(f"unknown representation {name!r} (available: {sorted(self.reps)})")
        return self.reps[name]


def _fail(message: str, source: str | None, location: str | None = None) -> GraphParseError:
    return GraphParseError(message, path=source, location=location)


def _expect(kind: type, value: Any, source: str | None, location: str) -> Any:
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise _fail(f"expected {kind.__name__}", source, location)
    return value


def _parse_rep(group: FiniteGroup, name: str, block: Any, source: str | None, location: str) -> Rep1D:
    block = _expect(dict, block, source, location)
    values = _expect(dict, block.get("rep"), source, f"{location}.rep")
    subgroup = block.get("subgroup")
    if subgroup is not None:
        members = set(_expect(list, subgroup, source, f"{location}.subgroup"))
        if members != set(values):
            raise _fail(f"rep values given for {sorted(values)} but subgroup is {sorted(members)}",
                        source, f"{location}.rep")
    return Rep1D(group, {str(el): v for el, v in values.items()}, name=name)


def symmetry_from_dict(data: Any, source: str | None = None) -> SymmetryDescription:
    """
    Build a SymmetryDescription from a parsed document.

    Raises:
        GraphParseError: Malformed document.
        SymmetryError: Invalid group table or representation.
    """
    doc = _expect(dict, data, source, "document")
    unknown = set(doc) - _TOP_LEVEL_KEYS
    if unknown:
        raise _fail(f"unknown keys {sorted(unknown)}", source, "document")
    for key in ("elements", "table", "vertex_perm", "edge_perm"):
        if key not in doc:
            raise _fail(f"missing key {key!r}", source, "document")

    elements = [str(el) for el in _expect(list, doc["elements"], source, "elements")]
    table = [[str(x) for x in _expect(list, row, source, f"table[{i}]")]
             for i, row in enumerate(_expect(list, doc["table"], source, "table"))]
    group = FiniteGroup(tuple(elements), tuple(tuple(row) for row in table))

    vertex_perm = {
        str(el): {str(v): str(w) for v, w in _expect(dict, m, source, f"vertex_perm.{el}").items()}
        for el, m in _expect(dict, doc["vertex_perm"], source, "vertex_perm").items()
    }
    edge_perm: dict[str, dict[str, EdgeImage]] = {}
    for el, m in _expect(dict, doc["edge_perm"], source, "edge_perm").items():
        images = {}
        for eid, image in _expect(dict, m, source, f"edge_perm.{el}").items():
            where = f"edge_perm.{el}.{eid}"
            image = _expect(dict, image, source, where)
            if "edge" not in image:
                raise _fail("missing key 'edge'", source, where)
            images[str(eid)] = EdgeImage(str(image["edge"]), bool(image.get("reversed", False)))
        edge_perm[str(el)] = images
    missing = set(elements) - set(vertex_perm) | set(elements) - set(edge_perm)
    if missing:
        raise SymmetryError(f"no permutation given for group elements {sorted(missing)}")
    action = GraphAction(group=group, vertex_perm=vertex_perm, edge_perm=edge_perm)

    reps: dict[str, Rep1D] = {}
    if "reps" in doc:
        for name, block in _expect(dict, doc["reps"], source, "reps").items():
            reps[str(name)] = _parse_rep(group, str(name), block, source, f"reps.{name}")
    if "rep" in doc:
        reps["rep"] = _parse_rep(group, "rep", {"subgroup": doc.get("subgroup"), "rep": doc["rep"]},
                                 source, "document")
    return SymmetryDescription(action=action, reps=reps)


def symmetry_to_dict(description: SymmetryDescription) -> dict[str, Any]:
    action = description.action
    group = action.group
    return {
        "elements": list(group.elements),
        "table": [list(row) for row in group.table],
        "vertex_perm": {el: dict(m) for el, m in action.vertex_perm.items()},
        "edge_perm": {
            el: {eid: {"edge": img.edge, "reversed": img.reversed} for eid, img in m.items()}
            for el, m in action.edge_perm.items()
        },
        "reps": {
            name: {"subgroup": list(rep.subgroup), "rep": dict(rep.values)}
            for name, rep in description.reps.items()
        },
    }


def parse_symmetry(text: str, source: str | None = None) -> SymmetryDescription:
    body, skipped = strip_comment_lines(text)
    try:
        data = json.loads(body)
    except json.JSONDecodeError as e:
        raise _fail(e.msg, source, f"line {e.lineno + skipped}, column {e.colno}") from e
    return symmetry_from_dict(data, source)


def load_symmetry(path: str | Path) -> SymmetryDescription:
    """
    Load a symmetry description file.

    Raises:
        GraphParseError: Unreadable or malformed file.
        SymmetryError: Invalid group table or representation.
    """
    file_path = Path(path)
    return parse_symmetry(read_text_file(file_path), source=str(file_path))


def serialize_symmetry(description: SymmetryDescription, path: str | Path, header: tuple[str, ...] = ()) -> None:
    save_text_file(render_json(symmetry_to_dict(description), header), Path(path))
