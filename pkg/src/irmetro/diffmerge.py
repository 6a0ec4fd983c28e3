"""Candidate selection and IR merging.

A variant phase execution is a candidate when the original has no execution
with the same (name, exec_order), or has one whose member identity multiset
differs.  Cross-run node identity is the node_key (generation phase name,
ordinal, opcode): addresses and node ids are run-specific and useless for
correspondence.

Merging folds candidates into a copy of the original.  A candidate member
whose key is already present anywhere in the merged graph is reused (only
its membership in the candidate phase is transferred); a member with an
unseen key is imported with a fresh node_id and the ir_id of its source
variant.  Imported edges are re-attached by key where the counterpart
endpoint exists and dropped otherwise; imported nodes carry only the
memberships of candidate phases, never whole variant subgraphs.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

from .core import (
    IRGraph,
    IRNode,
    NodeKey,
    PhaseExecution,
    PhaseRef,
    key_index,
    node_key,
    phase_index,
)

log = logging.getLogger(__name__)


class KeyCollisionError(Exception):
    """Two runs disagree on the opcode number behind one node key."""

    code = "key-collision"


@dataclass
class SubIR:
    """Candidate phase executions of one variant, with their member nodes."""

    source_ir_id: int
    candidate_phases: list[PhaseExecution] = field(default_factory=list)
    nodes: dict[int, IRNode] = field(default_factory=dict)  # variant-local ids


def _member_keys(exec_: PhaseExecution, g: IRGraph) -> Counter:
    keys: Counter = Counter()
    for nid in list(exec_.generated) + list(exec_.optimized):
        keys[node_key(g.nodes[nid])] += 1
    return keys


def select_candidates(original: IRGraph, variant: IRGraph) -> SubIR:
    """Pick the variant executions that differ from the original's."""
    orig_phases = phase_index(original)
    sub = SubIR(source_ir_id=variant.ir_id)
    for exec_ in variant.phases:
        counterpart = orig_phases.get(exec_.phase)
        if counterpart is not None and _member_keys(exec_, variant) == _member_keys(counterpart, original):
            continue
        sub.candidate_phases.append(exec_.copy())
        for nid in list(exec_.generated) + list(exec_.optimized):
            if nid not in sub.nodes:
                sub.nodes[nid] = variant.nodes[nid].copy()
    if sub.candidate_phases:
        log.debug("variant %d: %d candidate executions", variant.ir_id, len(sub.candidate_phases))
    return sub


def _insert_sorted(refs: list[PhaseRef], ref: PhaseRef) -> None:
    if ref in refs:
        return
    at = len(refs)
    for i, existing in enumerate(refs):
        if existing.exec_order > ref.exec_order:
            at = i
            break
    refs.insert(at, ref)


def merge_into_original(original: IRGraph, subirs: list[SubIR]) -> IRGraph:
    """Fold candidate executions from every sub-IR into a copy of the original."""
    if original.ir_id != 0:
        raise ValueError(f"merge target must be the original IR (ir_id 0), got {original.ir_id}")

    merged = original.copy()
    phases = phase_index(merged)
    by_key = key_index(merged)
    next_id = max(merged.nodes, default=-1) + 1

    def ensure_phase(ref: PhaseRef) -> PhaseExecution:
        exec_ = phases.get(ref)
        if exec_ is None:
            exec_ = PhaseExecution(ref)
            at = len(merged.phases)
            for i, existing in enumerate(merged.phases):
                if existing.phase.exec_order > ref.exec_order:
                    at = i
                    break
            merged.phases.insert(at, exec_)
            phases[ref] = exec_
        return exec_

    for sub in subirs:
        for cand in sorted(sub.candidate_phases, key=lambda p: p.phase.exec_order):
            exec_ = ensure_phase(cand.phase)
            gen_set = set(exec_.generated)
            opt_set = set(exec_.optimized)
            for vid, as_generated in [(i, True) for i in cand.generated] + [(i, False) for i in cand.optimized]:
                vnode = sub.nodes[vid]
                key = node_key(vnode)
                target = by_key.get(key)
                if target is None:
                    target = _import_node(merged, sub, vnode, next_id, by_key)
                    next_id += 1
                else:
                    existing = merged.nodes[target]
                    if existing.opcode_num != vnode.opcode_num:
                        raise KeyCollisionError(
                            f"node key {key}: opcode_num {existing.opcode_num} (ir {existing.ir_id}) "
                            f"vs {vnode.opcode_num} (ir {sub.source_ir_id})"
                        )
                node = merged.nodes[target]
                if as_generated:
                    # key identity pins down the generating execution; nothing
                    # to transfer unless this very execution generated it
                    if node.gen_phase == cand.phase and target not in gen_set:
                        exec_.generated.append(target)
                        gen_set.add(target)
                else:
                    if node.gen_phase != cand.phase and target not in opt_set and target not in gen_set:
                        exec_.optimized.append(target)
                        opt_set.add(target)
                        _insert_sorted(node.opt_phases, cand.phase)
    return merged


def _import_node(merged: IRGraph, sub: SubIR, vnode: IRNode, new_id: int, by_key: dict[NodeKey, int]) -> int:
    fresh = IRNode(
        node_id=new_id,
        address=vnode.address,
        opcode=vnode.opcode,
        opcode_num=vnode.opcode_num,
        ir_id=sub.source_ir_id,
        gen_phase=vnode.gen_phase,
        gen_ordinal=vnode.gen_ordinal,
        status=vnode.status.copy(),
    )
    gen_exec = None
    for p in merged.phases:
        if p.phase == vnode.gen_phase:
            gen_exec = p
            break
    if gen_exec is None:
        # generating execution must itself be a candidate; create it now so
        # the membership bookkeeping stays consistent
        gen_exec = PhaseExecution(vnode.gen_phase)
        at = len(merged.phases)
        for i, existing in enumerate(merged.phases):
            if existing.phase.exec_order > vnode.gen_phase.exec_order:
                at = i
                break
        merged.phases.insert(at, gen_exec)
    gen_exec.generated.append(new_id)

    for vnb in vnode.neighbors:
        nb_node = sub.nodes.get(vnb)
        if nb_node is None or nb_node.is_dummy:
            continue
        if vnb == vnode.node_id:
            fresh.neighbors.add(new_id)  # self loop travels with the node
            continue
        counterpart = by_key.get(node_key(nb_node))
        if counterpart is not None:
            fresh.neighbors.add(counterpart)
            merged.nodes[counterpart].neighbors.add(new_id)

    merged.nodes[new_id] = fresh
    by_key[node_key(fresh)] = new_id
    return new_id
