"""Pure-Python twin-merge kernel (fallback for the compiled extension).

Neighbor sets are packed into arbitrary-precision int bitmasks, which keeps
set comparison and edge removal cheap without any third-party dependency.
Both kernel implementations must walk pairs in exactly the same order so
that results are bit-identical regardless of which one is loaded.
"""

from __future__ import annotations

BACKEND = "python"


def twin_merge_partition(
    groups: list[int],
    neighbors: list[set[int]],
    max_passes: int = 0,
) -> list[int]:
    """Fixpoint merge of structurally equivalent nodes.

    groups[i] is an opaque compatibility class: only nodes with equal group
    ids may merge.  Two alive nodes i < j merge when their neighbor sets are
    equal after dropping any mutual edge and self loops involving the pair;
    j's edges are then removed outright (shared neighbors already cover
    them).  Passes repeat until stable, or max_passes if positive.

    Returns parent[i]: the index of the surviving node for every i,
    path-compressed to the final survivor.
    """
    n = len(groups)
    parent = list(range(n))
    if n == 0:
        return parent

    masks = [0] * n
    for i, nbs in enumerate(neighbors):
        m = 0
        for j in nbs:
            m |= 1 << j
        masks[i] = m

    buckets: dict[int, list[int]] = {}
    for i, gid in enumerate(groups):
        buckets.setdefault(gid, []).append(i)  # ascending by construction

    alive = [True] * n
    passes = 0
    while True:
        passes += 1
        changed = False
        for i in range(n):
            if not alive[i]:
                continue
            bucket = buckets[groups[i]]
            if len(bucket) < 2:
                continue
            excl_i = ~(1 << i)
            for j in bucket:
                if j <= i or not alive[j]:
                    continue
                excl = excl_i & ~(1 << j)
                if masks[i] & excl != masks[j] & excl:
                    continue
                # merge j into i: delete j's edges, never rewire
                mj = masks[j]
                clear_j = ~(1 << j)
                while mj:
                    low = mj & -mj
                    k = low.bit_length() - 1
                    masks[k] &= clear_j
                    mj ^= low
                masks[j] = 0
                alive[j] = False
                parent[j] = i
                changed = True
        if not changed:
            break
        if max_passes and passes >= max_passes:
            break

    for i in range(n):
        r = i
        while parent[r] != r:
            r = parent[r]
        parent[i] = r
    return parent
