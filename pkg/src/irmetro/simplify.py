"""Graph-level simplification: dead-node removal and equivalent-node merging.

Dead nodes (no edges, or only a self loop) never reach machine code and are
dropped first.  Equivalent nodes are then merged to a fixpoint: a pair
merges when opcode, optimization information (generation phase name,
optimized phase name sequence, status flags), ir_id and neighbor sets all
agree, the neighbor comparison ignoring a mutual edge between the pair.
The survivor is always the lower node_id and accumulates the other's
merged_count, so no multiplicity is silently lost.
"""

from __future__ import annotations

import logging

from .core import IRGraph, IRNode, PhaseExecution
from .kernels import twin_merge_partition

log = logging.getLogger(__name__)


def remove_dead_nodes(g: IRGraph) -> IRGraph:
    """Drop every node with no edge or only a self-looping edge."""
    live = {nid for nid, n in g.nodes.items() if n.neighbors - {nid}}
    nodes: dict[int, IRNode] = {}
    for nid in live:
        n = g.nodes[nid].copy()
        n.neighbors &= live
        nodes[nid] = n
    phases = [
        PhaseExecution(
            p.phase,
            [nid for nid in p.generated if nid in live],
            [nid for nid in p.optimized if nid in live],
        )
        for p in g.phases
    ]
    removed = len(g.nodes) - len(live)
    if removed:
        log.debug("removed %d dead nodes of %d", removed, len(g.nodes))
    return IRGraph(ir_id=g.ir_id, label=g.label, nodes=nodes, phases=phases, buggy=g.buggy)


def _merge_signature(n: IRNode) -> tuple:
    return (
        n.opcode,
        n.opcode_num,
        n.gen_phase.name,
        tuple(ref.name for ref in n.opt_phases),
        n.status.as_tuple(),
        n.ir_id,
    )


def merge_equivalent_nodes(g: IRGraph, single_pass: bool = False) -> IRGraph:
    """Merge equivalent node pairs to a fixpoint (or one pass, see flag).

    single_pass keeps the literal one-traversal behavior of the original
    procedure; the default iterates until no further pair qualifies.
    """
    order = sorted(g.nodes)
    index_of = {nid: i for i, nid in enumerate(order)}

    sig_ids: dict[tuple, int] = {}
    groups: list[int] = []
    neighbors: list[set[int]] = []
    for nid in order:
        n = g.nodes[nid]
        groups.append(sig_ids.setdefault(_merge_signature(n), len(sig_ids)))
        neighbors.append({index_of[nb] for nb in n.neighbors})

    parent = twin_merge_partition(groups, neighbors, max_passes=1 if single_pass else 0)

    counts: dict[int, int] = {}
    for i, p in enumerate(parent):
        counts[p] = counts.get(p, 0) + g.nodes[order[i]].merged_count
    alive_ids = {order[i] for i, p in enumerate(parent) if p == i}

    nodes: dict[int, IRNode] = {}
    for i, nid in enumerate(order):
        if parent[i] != i:
            continue
        n = g.nodes[nid].copy()
        n.neighbors &= alive_ids
        n.merged_count = counts[i]
        nodes[nid] = n
    phases = [
        PhaseExecution(
            p.phase,
            [nid for nid in p.generated if nid in alive_ids],
            [nid for nid in p.optimized if nid in alive_ids],
        )
        for p in g.phases
    ]
    if len(nodes) != len(g.nodes):
        log.debug("merged %d equivalent nodes into survivors", len(g.nodes) - len(nodes))
    return IRGraph(ir_id=g.ir_id, label=g.label, nodes=nodes, phases=phases, buggy=g.buggy)


def simplify_graph(g: IRGraph, single_pass: bool = False) -> IRGraph:
    """remove_dead_nodes followed by merge_equivalent_nodes."""
    return merge_equivalent_nodes(remove_dead_nodes(g), single_pass=single_pass)
