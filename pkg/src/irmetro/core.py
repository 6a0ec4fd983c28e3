"""Core data model shared by every pipeline stage.

An IR is a simple undirected graph over typed nodes, together with the
ordered sequence of optimization-phase executions that produced it.  Each
phase execution later becomes one hyperedge, so the bookkeeping here (who
generated a node, who optimized it) is the raw material for everything
downstream.

All structures are treated as immutable values once built: pipeline stages
copy what they change and never mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

ORIGINAL_IR_ID = 0

LABEL_ORIGINAL = "original"
LABEL_VARIANT = "variant"

#: (generation phase name, ordinal among that execution's generated nodes, opcode)
NodeKey = tuple[str, int, str]


@dataclass(frozen=True)
class PhaseRef:
    """Identifies one phase execution: name plus position in the run order."""

    name: str
    exec_order: int


@dataclass
class NodeStatusFlags:
    replaced: bool = False
    killed: bool = False
    removed: bool = False
    appended: bool = False

    def as_tuple(self) -> tuple[bool, bool, bool, bool]:
        return (self.replaced, self.killed, self.removed, self.appended)

    def copy(self) -> "NodeStatusFlags":
        return NodeStatusFlags(*self.as_tuple())


@dataclass
class IRNode:
    """One sea-of-nodes vertex.

    `gen_ordinal` is fixed when the node is first built: its position among
    the nodes generated by `gen_phase`.  It travels with the node through
    merging so that node_key stays comparable across runs even after the
    owning list has been extended.
    """

    node_id: int
    address: str
    opcode: str
    opcode_num: int
    ir_id: int
    gen_phase: PhaseRef
    gen_ordinal: int
    opt_phases: list[PhaseRef] = field(default_factory=list)
    neighbors: set[int] = field(default_factory=set)
    status: NodeStatusFlags = field(default_factory=NodeStatusFlags)
    merged_count: int = 1
    is_dummy: bool = False

    def copy(self) -> "IRNode":
        return IRNode(
            node_id=self.node_id,
            address=self.address,
            opcode=self.opcode,
            opcode_num=self.opcode_num,
            ir_id=self.ir_id,
            gen_phase=self.gen_phase,
            gen_ordinal=self.gen_ordinal,
            opt_phases=list(self.opt_phases),
            neighbors=set(self.neighbors),
            status=self.status.copy(),
            merged_count=self.merged_count,
            is_dummy=self.is_dummy,
        )


@dataclass
class PhaseExecution:
    """One run of an optimization phase and the node ids it touched."""

    phase: PhaseRef
    generated: list[int] = field(default_factory=list)
    optimized: list[int] = field(default_factory=list)

    @property
    def hyperedge_id(self) -> str:
        return str(self.phase.exec_order)

    def copy(self) -> "PhaseExecution":
        return PhaseExecution(self.phase, list(self.generated), list(self.optimized))


@dataclass
class IRGraph:
    """Simple undirected graph for one program run."""

    ir_id: int
    label: str
    nodes: dict[int, IRNode] = field(default_factory=dict)
    phases: list[PhaseExecution] = field(default_factory=list)
    buggy: bool | None = None

    def copy(self) -> "IRGraph":
        return IRGraph(
            ir_id=self.ir_id,
            label=self.label,
            nodes={nid: n.copy() for nid, n in self.nodes.items()},
            phases=[p.copy() for p in self.phases],
            buggy=self.buggy,
        )


@dataclass
class Hyperedge:
    """A set of node ids belonging to one (possibly merged) phase.

    Pre-reduction the id is the decimal exec_order; after same-name merging
    it is the constituent ids joined with '@' in ascending execution order.
    """

    id: str
    name: str
    members: set[int] = field(default_factory=set)
    suspiciousness: float | None = None
    is_isolated: bool = False

    @property
    def first_exec_order(self) -> int:
        return int(self.id.split("@", 1)[0])

    def copy(self) -> "Hyperedge":
        return Hyperedge(self.id, self.name, set(self.members), self.suspiciousness, self.is_isolated)


@dataclass
class Hypergraph:
    nodes: dict[int, IRNode] = field(default_factory=dict)
    hyperedges: list[Hyperedge] = field(default_factory=list)

    def copy(self) -> "Hypergraph":
        return Hypergraph(
            nodes={nid: n.copy() for nid, n in self.nodes.items()},
            hyperedges=[e.copy() for e in self.hyperedges],
        )


@dataclass(frozen=True)
class Violation:
    """One broken invariant, identified by a stable code plus the subject."""

    code: str
    subject: str
    detail: str

    def __str__(self) -> str:
        return f"{self.code} [{self.subject}]: {self.detail}"


def node_key(n: IRNode) -> NodeKey:
    """Canonical cross-run identity of a node.

    Addresses and node ids are run-specific, so correspondence between runs
    is structural: which phase generated the node, at which position, with
    which opcode.
    """
    if n.is_dummy:
        raise ValueError(f"dummy node {n.node_id} has no node key")
    return (n.gen_phase.name, n.gen_ordinal, n.opcode)


def key_index(g: IRGraph) -> dict[NodeKey, int]:
    """node_key -> node_id for every non-dummy node of g."""
    return {node_key(n): nid for nid, n in g.nodes.items() if not n.is_dummy}


def phase_index(g: IRGraph) -> dict[PhaseRef, PhaseExecution]:
    return {p.phase: p for p in g.phases}


def validate_graph(g: IRGraph) -> list[Violation]:
    """Check every IRGraph invariant; violations are data, not failures."""
    out: list[Violation] = []
    phases_by_ref: dict[PhaseRef, PhaseExecution] = {}

    for pos, exec_ in enumerate(g.phases):
        subject = f"phase {exec_.phase.name}@{exec_.phase.exec_order}"
        if exec_.phase.exec_order < 0:
            out.append(Violation("bad-exec-order", subject, "exec_order is negative"))
        if exec_.phase in phases_by_ref:
            out.append(Violation("duplicate-phase", subject, f"(name, exec_order) repeats at position {pos}"))
        else:
            phases_by_ref[exec_.phase] = exec_
        for kind, ids in (("generated", exec_.generated), ("optimized", exec_.optimized)):
            seen: set[int] = set()
            for nid in ids:
                if nid in seen:
                    out.append(Violation("duplicate-member", subject, f"node {nid} listed twice in {kind}"))
                seen.add(nid)
                if nid not in g.nodes:
                    out.append(Violation("unknown-phase-member", subject, f"{kind} lists unknown node {nid}"))
        overlap = set(exec_.generated) & set(exec_.optimized)
        if overlap:
            out.append(Violation("gen-opt-overlap", subject, f"nodes {sorted(overlap)} both generated and optimized"))

    generated_in: dict[int, list[PhaseRef]] = {}
    optimized_in: dict[int, list[PhaseRef]] = {}
    for exec_ in g.phases:
        for nid in exec_.generated:
            generated_in.setdefault(nid, []).append(exec_.phase)
        for nid in exec_.optimized:
            optimized_in.setdefault(nid, []).append(exec_.phase)

    seen_keys: dict[tuple[PhaseRef, int, str], int] = {}
    for nid, n in g.nodes.items():
        subject = f"node {nid}"
        if n.node_id != nid:
            out.append(Violation("id-mismatch", subject, f"stored node_id {n.node_id} differs from map key"))
        if nid < 0:
            out.append(Violation("bad-id", subject, "node_id is negative"))
        if n.opcode_num < 0:
            out.append(Violation("bad-opcode-num", subject, f"opcode_num {n.opcode_num} is negative"))
        if n.merged_count < 1:
            out.append(Violation("bad-merged-count", subject, f"merged_count {n.merged_count} < 1"))
        for nb in n.neighbors:
            if nb not in g.nodes:
                out.append(Violation("unknown-neighbor", subject, f"edge to unknown node {nb}"))
            elif nid not in g.nodes[nb].neighbors:
                out.append(Violation("asymmetric-edge", subject, f"lists neighbor {nb} but {nb} does not list {nid}"))

        if n.is_dummy:
            if n.neighbors:
                out.append(Violation("dummy-shape", subject, "dummy node has neighbors"))
            if n.merged_count != 1:
                out.append(Violation("dummy-shape", subject, "dummy node has merged_count != 1"))
            continue

        gens = generated_in.get(nid, [])
        if n.gen_phase not in phases_by_ref:
            out.append(Violation("unknown-gen-phase", subject, f"gen_phase {n.gen_phase} not among executions"))
        elif n.gen_phase not in gens:
            out.append(Violation("gen-membership", subject, f"not listed in generated of {n.gen_phase}"))
        if len(gens) > 1:
            out.append(Violation("multiple-generation", subject, f"generated by {len(gens)} executions"))

        kdup = (n.gen_phase, n.gen_ordinal, n.opcode)
        if kdup in seen_keys:
            out.append(
                Violation(
                    "duplicate-node-key",
                    subject,
                    f"node_key clashes with node {seen_keys[kdup]} inside {n.gen_phase}",
                )
            )
        else:
            seen_keys[kdup] = nid

        opts = optimized_in.get(nid, [])
        for ref in n.opt_phases:
            if ref == n.gen_phase:
                out.append(Violation("gen-in-opt", subject, f"gen_phase {ref} repeated in opt_phases"))
            if ref not in phases_by_ref:
                out.append(Violation("unknown-opt-phase", subject, f"opt_phases entry {ref} not among executions"))
            elif ref not in opts:
                out.append(Violation("opt-membership", subject, f"not listed in optimized of {ref}"))

    # reverse direction: membership lists must be reflected in node attributes
    for nid, refs in generated_in.items():
        n = g.nodes.get(nid)
        if n is None or n.is_dummy:
            continue
        for ref in refs:
            if n.gen_phase != ref:
                out.append(Violation("gen-membership", f"node {nid}", f"listed in generated of {ref} but gen_phase is {n.gen_phase}"))
    for nid, refs in optimized_in.items():
        n = g.nodes.get(nid)
        if n is None or n.is_dummy:
            continue
        for ref in refs:
            if ref not in n.opt_phases:
                out.append(Violation("opt-membership", f"node {nid}", f"listed in optimized of {ref} but opt_phases omits it"))

    return out
