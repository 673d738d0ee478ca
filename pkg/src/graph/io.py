"""Graph instance file format (JSON): load and dump with line-precise errors.

Format (see ``docs/file_formats.md``)::

    {
      "stable": [0, 1, 2],
      "unstable": [3],
      "vertex_weights": {"0": -1.2, "1": -0.4, "2": -0.9, "3": 0.7},
      "edges": [
        {"from": 0, "to": 1, "weight": 0.5},
        ...
      ],
      "dwell_min": 2,
      "dwell_max": 4,
      "dwells": {"0": 3, ...},              # optional
      "allow_negative_edges": false         # optional
    }
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.errors import GraphFileError, GraphValidationError
from src.schemas.graph import VertexId, WeightedDigraph

# --- File schema ---


class EdgeEntry(BaseModel):
    """One edge record of the graph file."""

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    source: VertexId = Field(alias="from")
    target: VertexId = Field(alias="to")
    weight: float


class GraphFile(BaseModel):
    """Raw graph file document, before cross-field checks."""

    model_config = ConfigDict(extra="forbid")

    stable: list[VertexId]
    unstable: list[VertexId] = Field(default_factory=list)
    vertex_weights: dict[VertexId, float]
    edges: list[EdgeEntry]
    dwell_min: int = Field(ge=1)
    dwell_max: int = Field(ge=1)
    dwells: dict[VertexId, int] = Field(default_factory=dict)
    allow_negative_edges: bool = False


# --- Loading ---


def load_graph(path: str | Path) -> WeightedDigraph:
    """Load a graph file, raising ``GraphFileError`` with the 1-based line of the first problem."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    graph = parse_graph(text, source=str(path))
    logger.info(
        "Loaded graph {} (|P_S|={}, |P_U|={}, |E|={})", path, len(graph.stable), len(graph.unstable), len(graph.edges)
    )
    return graph


def parse_graph(text: str, *, source: str = "<string>") -> WeightedDigraph:
    """Parse graph JSON text; ``source`` names the origin in error messages."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFileError(f"Invalid JSON: {exc.msg}", path=source, line=exc.lineno) from exc

    try:
        document = GraphFile.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = tuple(first["loc"])
        raise GraphFileError(
            f"{'.'.join(str(part) for part in loc) or 'document'}: {first['msg']}",
            path=source,
            line=locate_line(text, loc),
        ) from exc

    _check_cross_references(document, text, source)

    try:
        return WeightedDigraph(
            stable=frozenset(document.stable),
            unstable=frozenset(document.unstable),
            vertex_weights=document.vertex_weights,
            edge_weights={(edge.source, edge.target): edge.weight for edge in document.edges},
            dwell_min=document.dwell_min,
            dwell_max=document.dwell_max,
            dwells=document.dwells,
            allow_negative_edges=document.allow_negative_edges,
        )
    except GraphValidationError as exc:
        raise GraphFileError(str(exc), path=source, line=1) from exc
    except ValidationError as exc:
        raise GraphFileError(str(exc.errors()[0]["msg"]), path=source, line=1) from exc


def _check_cross_references(document: GraphFile, text: str, source: str) -> None:
    """Entry-level invariants, reported at the line of the offending entry."""
    stable = set(document.stable)
    unstable = set(document.unstable)
    for index, vertex in enumerate(document.unstable):
        if vertex in stable:
            line = locate_line(text, ("unstable", index))
            raise GraphFileError(f"Vertex {vertex} listed as both stable and unstable", path=source, line=line)
    vertices = stable | unstable
    for vertex, weight in document.vertex_weights.items():
        problem = None
        if vertex not in vertices:
            problem = f"Weight for unknown vertex {vertex}"
        elif vertex in stable and not weight < 0:
            problem = f"Stable vertex {vertex} needs weight < 0, got {weight}"
        elif vertex in unstable and not weight > 0:
            problem = f"Unstable vertex {vertex} needs weight > 0, got {weight}"
        if problem is not None:
            line = locate_line(text, ("vertex_weights", str(vertex)))
            raise GraphFileError(problem, path=source, line=line)

    seen: set[tuple[int, int]] = set()
    for index, edge in enumerate(document.edges):
        pair = (edge.source, edge.target)
        problem = None
        if edge.source == edge.target:
            problem = f"Self-loop at vertex {edge.source}"
        elif edge.source not in vertices or edge.target not in vertices:
            problem = f"Edge {pair} references an unknown vertex"
        elif pair in seen:
            problem = f"Duplicate edge {pair}"
        elif edge.weight < 0 and not document.allow_negative_edges:
            problem = f"Edge {pair} has negative weight {edge.weight}"
        if problem is not None:
            raise GraphFileError(problem, path=source, line=locate_line(text, ("edges", index)))
        seen.add(pair)

    for vertex, dwell in document.dwells.items():
        if not document.dwell_min <= dwell <= document.dwell_max:
            raise GraphFileError(
                f"Dwell {dwell} of vertex {vertex} outside [{document.dwell_min}, {document.dwell_max}]",
                path=source,
                line=locate_line(text, ("dwells", str(vertex))),
            )


# --- Line location ---

_WHITESPACE = " \t\r\n"


def locate_line(text: str, loc: tuple[Any, ...]) -> int:
    """Return the 1-based line where the JSON value at path ``loc`` starts.

    Walks the document with ``JSONDecoder.raw_decode`` along the path; falls
    back to the deepest resolvable ancestor, or line 1.
    """
    decoder = json.JSONDecoder()
    pos = _skip_ws(text, 0)
    for key in loc:
        found = _child_position(text, pos, key, decoder)
        if found is None:
            break
        pos = found
    return text.count("\n", 0, pos) + 1


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos] in _WHITESPACE:
        pos += 1
    return pos


def _child_position(text: str, pos: int, key: Any, decoder: json.JSONDecoder) -> int | None:
    if pos >= len(text) or text[pos] not in "{[":
        return None
    is_object = text[pos] == "{"
    closing = "}" if is_object else "]"
    pos = _skip_ws(text, pos + 1)
    index = 0
    try:
        while pos < len(text) and text[pos] != closing:
            member_key: Any = index
            if is_object:
                member_key, pos = decoder.raw_decode(text, pos)
                pos = _skip_ws(text, pos)
                pos = _skip_ws(text, pos + 1)  # ':'
            if str(member_key) == str(key):
                return pos
            _, pos = decoder.raw_decode(text, pos)
            pos = _skip_ws(text, pos)
            if pos < len(text) and text[pos] == ",":
                pos = _skip_ws(text, pos + 1)
            index += 1
    except json.JSONDecodeError:
        return None
    return None


# --- Dumping ---


def graph_to_document(g: WeightedDigraph) -> dict[str, Any]:
    """Plain JSON-ready document for a graph."""
    document: dict[str, Any] = {
        "stable": sorted(g.stable),
        "unstable": sorted(g.unstable),
        "vertex_weights": {str(v): g.vertex_weights[v] for v in g.vertices},
        "edges": [{"from": s, "to": t, "weight": g.edge_weights[(s, t)]} for s, t in g.edges],
        "dwell_min": g.dwell_min,
        "dwell_max": g.dwell_max,
    }
    if g.dwells:
        document["dwells"] = {str(v): g.dwells[v] for v in sorted(g.dwells)}
    if g.allow_negative_edges:
        document["allow_negative_edges"] = True
    return document


def dumps_graph(g: WeightedDigraph) -> str:
    """Serialize a graph with one edge per line so loader errors point at single entries."""
    document = graph_to_document(g)
    lines = ["{"]
    for key in ("stable", "unstable", "vertex_weights"):
        lines.append(f"  {json.dumps(key)}: {json.dumps(document[key])},")
    lines.append('  "edges": [')
    edge_lines = [f"    {json.dumps(edge)}" for edge in document["edges"]]
    lines.append(",\n".join(edge_lines))
    lines.append("  ],")
    tail = [f"  {json.dumps(key)}: {json.dumps(document[key])}" for key in document if key not in _HEAD_KEYS]
    lines.append(",\n".join(tail))
    lines.append("}")
    return "\n".join(line for line in lines if line) + "\n"


_HEAD_KEYS = frozenset({"stable", "unstable", "vertex_weights", "edges"})


def dump_graph(g: WeightedDigraph, path: str | Path) -> None:
    """Write a graph file."""
    path = Path(path)
    path.write_text(dumps_graph(g), encoding="utf-8")
    logger.info("Wrote graph to {} ({} vertices, {} edges)", path, g.n_vertices, len(g.edges))
