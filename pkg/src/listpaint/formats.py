"""graph6 and edge-list codecs, and JSON witness documents."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

import jsonschema

from .errors import (
    DuplicateEdge,
    EdgeListError,
    HashMismatch,
    MalformedHeader,
    NonPrintableByte,
    ParseError,
    SchemaViolation,
    SelfLoop,
    TruncatedBitVector,
)
from .graph import Graph

GRAPH6_HEADER = b">>graph6<<"
GRAPH6_MAX_N = 68719476735
WITNESS_VERSION = 1

# ---------------------------------------------------------------------------
# graph6
# ---------------------------------------------------------------------------


def _size_prefix(n: int) -> bytes:
    if n < 0 or n > GRAPH6_MAX_N:
        raise ValueError(f"graph6 cannot encode n={n}")
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes([126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)])
    return bytes([126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)])


def encode_graph6(g: Graph) -> bytes:
    """graph6 bytes (no header, no newline) for ``g``."""
    out = bytearray(_size_prefix(g.n))
    acc = 0
    nbits = 0
    for j in range(1, g.n):
        aj = g.adj[j]
        for i in range(j):
            acc = (acc << 1) | (aj >> i & 1)
            nbits += 1
            if nbits == 6:
                out.append(acc + 63)
                acc = nbits = 0
    if nbits:
        out.append((acc << (6 - nbits)) + 63)
    return bytes(out)


def decode_graph6(data: bytes | str) -> Graph:
    """Parse one graph6 record; an optional ``>>graph6<<`` header and a trailing newline are allowed."""
    if isinstance(data, str):
        data = data.encode("latin-1")
    base = 0
    if data.startswith(GRAPH6_HEADER):
        base = len(GRAPH6_HEADER)
    body = data[base:]
    if body.endswith(b"\r\n"):
        body = body[:-2]
    elif body.endswith(b"\n"):
        body = body[:-1]
    for i, b in enumerate(body):
        if not 63 <= b <= 126:
            raise NonPrintableByte(f"byte value {b} outside 63..126", base + i)
    if not body:
        raise MalformedHeader("missing size prefix", base)
    if body[0] != 126:
        n, pos = body[0] - 63, 1
    elif len(body) >= 2 and body[1] == 126:
        if len(body) < 8:
            raise MalformedHeader("truncated 8-byte size prefix", base + len(body))
        n = 0
        for b in body[2:8]:
            n = (n << 6) | (b - 63)
        pos = 8
        if n <= 258047:
            raise MalformedHeader(f"non-minimal size prefix for n={n}", base)
    else:
        if len(body) < 4:
            raise MalformedHeader("truncated 4-byte size prefix", base + len(body))
        n = 0
        for b in body[1:4]:
            n = (n << 6) | (b - 63)
        pos = 4
        if n <= 62:
            raise MalformedHeader(f"non-minimal size prefix for n={n}", base)
    total = n * (n - 1) // 2
    need = (total + 5) // 6
    have = len(body) - pos
    if have < need:
        raise TruncatedBitVector(f"expected {need} data bytes, found {have}", base + len(body))
    if have > need:
        raise ParseError(f"{have - need} trailing bytes after bit vector", base + pos + need)
    adj = [0] * n
    k = 0
    byte_i = pos
    shift = 5
    for j in range(1, n):
        for i in range(j):
            if (body[byte_i] - 63) >> shift & 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
            k += 1
            shift -= 1
            if shift < 0:
                shift = 5
                byte_i += 1
    if total % 6 and (body[byte_i] - 63) & ((1 << (shift + 1)) - 1):
        raise ParseError("nonzero padding bits", base + byte_i)
    return Graph.from_masks(adj)


def read_graph6_corpus(data: bytes | str) -> list[Graph]:
    """One graph per nonblank line; line offsets are folded into error offsets."""
    if isinstance(data, str):
        data = data.encode("latin-1")
    graphs = []
    offset = 0
    for line in data.splitlines(keepends=True):
        stripped = line.rstrip(b"\r\n")
        if stripped:
            try:
                graphs.append(decode_graph6(stripped))
            except ParseError as exc:
                raise type(exc)(str(exc).split(" (at offset")[0], offset + (exc.offset or 0)) from None
        offset += len(line)
    return graphs


def write_graph6_corpus(graphs) -> bytes:
    return b"".join(encode_graph6(g) + b"\n" for g in graphs)


# ---------------------------------------------------------------------------
# Edge lists
# ---------------------------------------------------------------------------


def encode_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"] + [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def decode_edge_list(text: str) -> Graph:
    """Parse ``u v`` lines. A leading ``n m`` line is a header when it is consistent with the body."""
    rows: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListError(f"expected two integers, got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError(f"non-integer token in {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise EdgeListError("negative vertex id", lineno)
        rows.append((lineno, u, v))
    n_declared = None
    if rows:
        _, hn, hm = rows[0]
        body = rows[1:]
        if hm == len(body) and all(u < hn and v < hn for _, u, v in body):
            n_declared = hn
            rows = body
    seen = set()
    edges = []
    for lineno, u, v in rows:
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"duplicate edge {key}", lineno)
        seen.add(key)
        edges.append(key)
    n = n_declared if n_declared is not None else max((max(e) for e in edges), default=-1) + 1
    return Graph(n, edges)


def load_graph(path, fmt: str | None = None) -> Graph:
    """Read a single graph from ``path``; format from ``fmt`` or the file suffix."""
    from pathlib import Path

    path = Path(path)
    fmt = fmt or ("graph6" if path.suffix in (".g6", ".graph6") else "edges")
    if fmt == "graph6":
        corpus = read_graph6_corpus(path.read_bytes())
        if len(corpus) != 1:
            raise ParseError(f"expected exactly one graph, found {len(corpus)}")
        return corpus[0]
    return decode_edge_list(path.read_text())


def graph_digest(g: Graph) -> str:
    """Digest of the labeled graph; witnesses reference vertex ids, so labels matter."""
    return "sha256:" + hashlib.sha256(encode_graph6(g)).hexdigest()


# ---------------------------------------------------------------------------
# Witness documents
# ---------------------------------------------------------------------------

_VID = {"type": "integer", "minimum": 0}
_TOKENS = {"type": "array", "items": {"type": "integer", "minimum": 1}}
_MASK = {"type": "integer", "minimum": 0}

PAYLOAD_SCHEMAS: dict[str, dict] = {
    "orientation": {
        "type": "object",
        "required": ["arcs"],
        "additionalProperties": False,
        "properties": {
            "arcs": {"type": "array", "items": {"type": "array", "items": _VID, "minItems": 2, "maxItems": 2}},
            "claims": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "max_outdegree": {"type": "integer", "minimum": 0},
                    "odd_cycle_free": {"type": "boolean"},
                    "alon_tarsi": {"type": "boolean"},
                },
            },
            "meta": {"type": "object"},
        },
    },
    "removal-scheme": {
        "type": "object",
        "required": ["tokens", "restricted", "steps"],
        "additionalProperties": False,
        "properties": {
            "tokens": _TOKENS,
            "restricted": {"type": "boolean"},
            "steps": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["vertex", "save"],
                    "additionalProperties": False,
                    "properties": {"vertex": _VID, "save": {"type": "array", "items": _VID}},
                },
            },
            "trace": {"type": "object"},
        },
    },
    "sd3-sequence": {
        "type": "object",
        "required": ["tokens", "ops"],
        "additionalProperties": False,
        "properties": {
            "tokens": _TOKENS,
            "ops": {
                "type": "array",
                "items": {
                    "oneOf": [
                        {
                            "type": "object",
                            "required": ["op", "v"],
                            "additionalProperties": False,
                            "properties": {"op": {"const": "reduce"}, "v": _VID},
                        },
                        {
                            "type": "object",
                            "required": ["op", "v", "w"],
                            "additionalProperties": False,
                            "properties": {"op": {"const": "edge-delete"}, "v": _VID, "w": _VID},
                        },
                    ]
                },
            },
        },
    },
    "painting-strategy": {
        "type": "object",
        "required": ["tokens", "policy"],
        "additionalProperties": False,
        "properties": {
            "tokens": _TOKENS,
            "policy": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["alive", "tokens", "replies"],
                    "additionalProperties": False,
                    "properties": {
                        "alive": _MASK,
                        "tokens": {"type": "array", "items": {"type": "integer"}},
                        "replies": {
                            "type": "array",
                            "items": {"type": "array", "items": _MASK, "minItems": 2, "maxItems": 2},
                        },
                    },
                },
            },
        },
    },
    "parameter-report": {
        "type": "object",
        "required": ["values", "status"],
        "additionalProperties": False,
        "properties": {
            "n": {"type": "integer", "minimum": 0},
            "m": {"type": "integer", "minimum": 0},
            "values": {"type": "object", "additionalProperties": {"type": ["integer", "null"]}},
            "status": {"type": "object", "additionalProperties": {"type": "string"}},
            "brackets": {
                "type": "object",
                "additionalProperties": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
            },
            "witnesses": {"type": "object"},
            "violations": {"type": "array", "items": {"type": "string"}},
        },
    },
}

WITNESS_KINDS = tuple(PAYLOAD_SCHEMAS)

DOCUMENT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["kind", "version", "payload", "graph_hash"],
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": list(WITNESS_KINDS)},
        "version": {"const": WITNESS_VERSION},
        "graph_hash": {"type": "string", "pattern": "^sha256:[0-9a-f]{64}$"},
        "payload": {"type": "object"},
    },
}


@dataclass
class WitnessDocument:
    kind: str
    payload: dict[str, Any]
    graph_hash: str
    version: int = WITNESS_VERSION
    extra: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def for_graph(cls, kind: str, g: Graph, payload: dict) -> "WitnessDocument":
        return cls(kind=kind, payload=payload, graph_hash=graph_digest(g))


def _path(prefix: str, parts) -> str:
    return ".".join([prefix] + [str(p) for p in parts])


def _validate(obj: dict) -> None:
    for err in sorted(jsonschema.Draft202012Validator(DOCUMENT_SCHEMA).iter_errors(obj), key=str):
        raise SchemaViolation(_path("$", err.absolute_path), err.message)
    schema = PAYLOAD_SCHEMAS[obj["kind"]]
    for err in sorted(jsonschema.Draft202012Validator(schema).iter_errors(obj["payload"]), key=str):
        raise SchemaViolation(_path("$.payload", err.absolute_path), err.message)


def _structural_check(doc: WitnessDocument, g: Graph) -> None:
    p = doc.payload

    def vid(path, v):
        if v >= g.n:
            raise SchemaViolation(path, f"vertex {v} not in graph with {g.n} vertices")

    if "tokens" in p and len(p["tokens"]) != g.n:
        raise SchemaViolation("$.payload.tokens", f"expected {g.n} entries, found {len(p['tokens'])}")
    if doc.kind == "orientation":
        for i, (u, v) in enumerate(p["arcs"]):
            vid(f"$.payload.arcs.{i}", max(u, v))
            if not g.has_edge(u, v):
                raise SchemaViolation(f"$.payload.arcs.{i}", f"({u}, {v}) is not an edge")
    elif doc.kind == "removal-scheme":
        for i, step in enumerate(p["steps"]):
            u = step["vertex"]
            vid(f"$.payload.steps.{i}.vertex", u)
            for w in step["save"]:
                vid(f"$.payload.steps.{i}.save", w)
                if not g.has_edge(u, w):
                    raise SchemaViolation(f"$.payload.steps.{i}.save", f"{w} is not a neighbor of {u}")
            if len(set(step["save"])) != len(step["save"]):
                raise SchemaViolation(f"$.payload.steps.{i}.save", "repeated vertex")
    elif doc.kind == "sd3-sequence":
        for i, op in enumerate(p["ops"]):
            vid(f"$.payload.ops.{i}.v", op["v"])
            if op["op"] == "edge-delete":
                vid(f"$.payload.ops.{i}.w", op["w"])
    elif doc.kind == "painting-strategy":
        limit = 1 << g.n
        for i, entry in enumerate(p["policy"]):
            if entry["alive"] >= limit:
                raise SchemaViolation(f"$.payload.policy.{i}.alive", "mask exceeds vertex set")


def encode_witness(doc: WitnessDocument) -> str:
    obj = {"kind": doc.kind, "version": doc.version, "graph_hash": doc.graph_hash, "payload": doc.payload}
    _validate(obj)
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def decode_witness(text: str, graph: Graph | None = None) -> WitnessDocument:
    """Parse and validate a witness; with ``graph`` also check its digest and vertex references."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
    if not isinstance(obj, dict):
        raise SchemaViolation("$", "document must be an object")
    _validate(obj)
    doc = WitnessDocument(kind=obj["kind"], payload=obj["payload"], graph_hash=obj["graph_hash"], version=obj["version"])
    if graph is not None:
        if doc.graph_hash != graph_digest(graph):
            raise HashMismatch(f"witness digest {doc.graph_hash} does not match the supplied graph")
        _structural_check(doc, graph)
    return doc
