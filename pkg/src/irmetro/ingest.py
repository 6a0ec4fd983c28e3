"""IR dump parsing and corpus loading.

One dump file holds one graph.  The phase lists are the single source of
truth for generation/optimization bookkeeping; per-node gen_phase,
gen_ordinal and opt_phases are derived while parsing.  Validation is strict
and fail-fast: localization depends on exact phase bookkeeping, so a
malformed or inconsistent dump is rejected rather than repaired.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .core import (
    LABEL_ORIGINAL,
    LABEL_VARIANT,
    IRGraph,
    IRNode,
    NodeStatusFlags,
    PhaseExecution,
    PhaseRef,
    validate_graph,
)

STATUS_FIELDS = ("replaced", "killed", "removed", "appended")


class CorpusError(Exception):
    """Base for ingest failures; `code` matches the documented error names."""

    code = "corpus-error"


class ParseError(CorpusError):
    code = "parse-error"


class InvariantError(CorpusError):
    code = "invariant-error"


class IrIdConflictError(CorpusError):
    code = "ir-id-conflict"


@dataclass
class CorpusManifest:
    original: Path
    variants: list[Path] = field(default_factory=list)

    @property
    def n_variants(self) -> int:
        return len(self.variants)


def _require(data: dict, key: str, kind, where: str):
    if key not in data:
        raise ParseError(f"{where}: missing field '{key}'")
    value = data[key]
    if kind is int and isinstance(value, bool):
        raise ParseError(f"{where}: field '{key}' must be {kind.__name__}, got bool")
    if not isinstance(value, kind):
        raise ParseError(f"{where}: field '{key}' must be {kind.__name__}, got {type(value).__name__}")
    return value


def _int_list(data: dict, key: str, where: str) -> list[int]:
    raw = _require(data, key, list, where)
    for i, v in enumerate(raw):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ParseError(f"{where}: '{key}[{i}]' must be an integer")
    return list(raw)


def parse_graph(data: dict, source: str = "<memory>") -> IRGraph:
    """Build and validate an IRGraph from a decoded dump document."""
    if not isinstance(data, dict):
        raise ParseError(f"{source}: top level must be an object")

    ir_id = _require(data, "ir_id", int, source)
    label = _require(data, "label", str, source)
    if label not in (LABEL_ORIGINAL, LABEL_VARIANT):
        raise ParseError(f"{source}: label must be 'original' or 'variant', got '{label}'")
    buggy = data.get("buggy")
    if buggy is not None and not isinstance(buggy, bool):
        raise ParseError(f"{source}: field 'buggy' must be boolean or null")

    phases: list[PhaseExecution] = []
    for i, p in enumerate(_require(data, "phases", list, source)):
        where = f"{source}: phases[{i}]"
        if not isinstance(p, dict):
            raise ParseError(f"{where} must be an object")
        ref = PhaseRef(_require(p, "name", str, where), _require(p, "exec_order", int, where))
        phases.append(PhaseExecution(ref, _int_list(p, "generated", where), _int_list(p, "optimized", where)))

    nodes: dict[int, IRNode] = {}
    for i, nd in enumerate(_require(data, "nodes", list, source)):
        where = f"{source}: nodes[{i}]"
        if not isinstance(nd, dict):
            raise ParseError(f"{where} must be an object")
        nid = _require(nd, "id", int, where)
        if nid in nodes:
            raise InvariantError(f"{where}: duplicate node id {nid}")
        status_raw = _require(nd, "status", dict, where)
        for f in STATUS_FIELDS:
            if not isinstance(status_raw.get(f), bool):
                raise ParseError(f"{where}: status.{f} must be boolean")
        nodes[nid] = IRNode(
            node_id=nid,
            address=_require(nd, "address", str, where),
            opcode=_require(nd, "opcode", str, where),
            opcode_num=_require(nd, "opcode_num", int, where),
            ir_id=ir_id,
            gen_phase=PhaseRef("", -1),  # filled from the phase lists below
            gen_ordinal=-1,
            neighbors=set(_int_list(nd, "neighbors", where)),
            status=NodeStatusFlags(**{f: status_raw[f] for f in STATUS_FIELDS}),
        )

    for exec_ in phases:
        for ordinal, nid in enumerate(exec_.generated):
            n = nodes.get(nid)
            if n is None:
                raise InvariantError(f"{source}: phase {exec_.phase.name}@{exec_.phase.exec_order} generated unknown node {nid}")
            if n.gen_ordinal >= 0:
                raise InvariantError(f"{source}: node {nid} generated by more than one execution")
            n.gen_phase = exec_.phase
            n.gen_ordinal = ordinal
        for nid in exec_.optimized:
            n = nodes.get(nid)
            if n is None:
                raise InvariantError(f"{source}: phase {exec_.phase.name}@{exec_.phase.exec_order} optimized unknown node {nid}")
            n.opt_phases.append(exec_.phase)

    for nid, n in nodes.items():
        if n.gen_ordinal < 0:
            raise InvariantError(f"{source}: node {nid} is not generated by any execution")

    graph = IRGraph(ir_id=ir_id, label=label, nodes=nodes, phases=phases, buggy=buggy)
    violations = validate_graph(graph)
    if violations:
        head = "; ".join(str(v) for v in violations[:5])
        raise InvariantError(f"{source}: invalid graph ({len(violations)} violations): {head}")
    return graph


def serialize_graph(g: IRGraph) -> dict:
    """Inverse of parse_graph for valid single-run graphs."""
    return {
        "ir_id": g.ir_id,
        "label": g.label,
        "buggy": g.buggy,
        "phases": [
            {
                "name": p.phase.name,
                "exec_order": p.phase.exec_order,
                "generated": list(p.generated),
                "optimized": list(p.optimized),
            }
            for p in g.phases
        ],
        "nodes": [
            {
                "id": n.node_id,
                "address": n.address,
                "opcode": n.opcode,
                "opcode_num": n.opcode_num,
                "neighbors": sorted(n.neighbors),
                "status": {f: getattr(n.status, f) for f in STATUS_FIELDS},
            }
            for _, n in sorted(g.nodes.items())
        ],
    }


def read_graph(path: Path | str) -> IRGraph:
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"dump file does not exist: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_graph(data, source=str(path))


def write_graph(g: IRGraph, path: Path | str, compact: bool = False) -> None:
    doc = serialize_graph(g)
    text = json.dumps(doc, sort_keys=True, separators=((",", ":") if compact else (",", ": ")), indent=None if compact else 2)
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_manifest(path: Path | str) -> CorpusManifest:
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"manifest does not exist: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: manifest must be an object")
    original = _require(data, "original", str, str(path))
    variants_raw = _require(data, "variants", list, str(path))
    variants = []
    for i, v in enumerate(variants_raw):
        if not isinstance(v, str):
            raise ParseError(f"{path}: variants[{i}] must be a path string")
        variants.append((path.parent / v).resolve() if not Path(v).is_absolute() else Path(v))
    original_path = (path.parent / original).resolve() if not Path(original).is_absolute() else Path(original)
    all_paths = [original_path, *variants]
    if len(set(all_paths)) != len(all_paths):
        raise ParseError(f"{path}: manifest paths are not distinct")
    return CorpusManifest(original=original_path, variants=variants)


def load_corpus(manifest: CorpusManifest) -> tuple[IRGraph, list[IRGraph]]:
    """Load the original (ir_id 0) plus variants (ir_id 1..N, manifest order).

    The declared ir_id and label of each dump must agree with its manifest
    position; graphs are never renumbered.
    """
    original = read_graph(manifest.original)
    if original.ir_id != 0:
        raise IrIdConflictError(f"{manifest.original}: original must declare ir_id 0, found {original.ir_id}")
    if original.label != LABEL_ORIGINAL:
        raise InvariantError(f"{manifest.original}: original must be labeled '{LABEL_ORIGINAL}'")

    variants: list[IRGraph] = []
    for i, vpath in enumerate(manifest.variants, start=1):
        g = read_graph(vpath)
        if g.ir_id != i:
            raise IrIdConflictError(f"{vpath}: expected ir_id {i} from manifest order, found {g.ir_id}")
        if g.label != LABEL_VARIANT:
            raise InvariantError(f"{vpath}: variant must be labeled '{LABEL_VARIANT}'")
        variants.append(g)
    return original, variants
