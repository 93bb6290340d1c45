"""Independence oracle and optima for laminar capacity constraints.

A subset is independent when, for every family node, the number of selected
elements inside that node's set stays within its capacity.  The
maximum-weight independent subset is found greedily (scan in weight order,
keep whatever still fits); for laminar constraints the greedy result is
exact.  ``brute_force_opt`` re-derives the optimum by exhaustive search and
exists purely as a cross-check oracle for small inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .model import InstanceError, LaminarInstance

BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True)
class RankedOptimum:
    """A per-node optimum: element ids sorted lightest-first."""

    node: int
    elements: tuple[int, ...]
    weight: float

    @property
    def ids(self) -> frozenset[int]:
        return frozenset(self.elements)

    def __len__(self) -> int:
        return len(self.elements)


def node_usage(inst: LaminarInstance, element_ids: Iterable[int]) -> dict[int, int]:
    """Count how many of the given elements fall inside each node's set."""
    pre = inst.pre()
    counts = [0] * len(pre.mu)
    for eid in element_ids:
        if eid not in pre.rank_by_id:
            raise InstanceError(f"unknown element id {eid}")
        for b in pre.chain_by_rank[pre.rank_by_id[eid]]:
            counts[b] += 1
    return {pre.node_ids[b]: counts[b] for b in range(len(counts))}


def is_independent(inst: LaminarInstance, element_ids: Iterable[int]) -> bool:
    """True iff every node's capacity accommodates its share of the set."""
    pre = inst.pre()
    usage = node_usage(inst, element_ids)
    return all(usage[pre.node_ids[b]] <= pre.mu[b] for b in range(len(pre.mu)))


def _rank_flags(pre, subset) -> list[bool]:
    if subset is None:
        return [True] * pre.n_real
    flags = [False] * pre.n_real
    for eid in subset:
        r = pre.rank_by_id.get(eid)
        if r is None:
            raise InstanceError(f"unknown element id {eid}")
        flags[r] = True
    return flags


def _greedy_ranks(pre, in_v: list[bool], b: int) -> list[int]:
    """Greedy scan of the node's members in weight order (ascending rank),
    restricted to the node's subtree constraints.  Returns chosen ranks in
    scan order (heaviest first)."""
    counts = [0] * len(pre.mu)
    out = []
    for r in pre.members_ranks[b]:
        if not in_v[r]:
            continue
        ch = pre.chain_by_rank[r]
        cut = len(ch) - pre.depth[b]
        ok = True
        for nx in ch[:cut]:
            if counts[nx] >= pre.mu[nx]:
                ok = False
                break
        if ok:
            for nx in ch[:cut]:
                counts[nx] += 1
            out.append(r)
    return out


def _ranked_optimum(inst: LaminarInstance, node_id: int, ranks_heavy_first) -> RankedOptimum:
    pre = inst.pre()
    ids = tuple(pre.ids_by_rank[r] for r in reversed(ranks_heavy_first))
    return RankedOptimum(node_id, ids, sum(pre.w_by_rank[r] for r in ranks_heavy_first))


def greedy_opt(inst: LaminarInstance, subset, node_id: int) -> RankedOptimum:
    """Maximum-weight independent subset of ``subset`` restricted to the
    node's set and its capacity subtree.  ``subset=None`` means the whole
    ground set."""
    pre = inst.pre()
    if node_id not in pre.node_index:
        raise InstanceError(f"unknown node id {node_id}")
    b = pre.node_index[node_id]
    return _ranked_optimum(inst, node_id, _greedy_ranks(pre, _rank_flags(pre, subset), b))


def all_reference_sets(inst: LaminarInstance, sample) -> dict[int, RankedOptimum]:
    """Per-node optimum of the sample, computed independently for each node."""
    pre = inst.pre()
    in_v = _rank_flags(pre, sample)
    return {
        node_id: _ranked_optimum(inst, node_id, _greedy_ranks(pre, in_v, pre.node_index[node_id]))
        for node_id in pre.node_ids
    }


def brank(inst: LaminarInstance, element_id: int, node_id: int, subset=None) -> int:
    """Backward rank: how many elements of the node's optimum (restricted to
    ``subset``) are strictly lighter than the given element."""
    pre = inst.pre()
    if element_id not in pre.rank_by_id:
        raise InstanceError(f"unknown element id {element_id}")
    r = pre.rank_by_id[element_id]
    if node_id not in pre.node_index:
        raise InstanceError(f"unknown node id {node_id}")
    b = pre.node_index[node_id]
    if b not in pre.chain_by_rank[r]:
        raise InstanceError(f"element {element_id} is not contained in node {node_id}")
    chosen = _greedy_ranks(pre, _rank_flags(pre, subset), b)
    return sum(1 for c in chosen if c > r)


def brute_force_opt(inst: LaminarInstance, subset, node_id: int) -> RankedOptimum:
    """Exhaustive maximum-weight independent subset (test oracle).

    Tie-breaking mirrors the element order exactly: among equal-weight
    subsets the one holding the earlier element in weight order wins, which
    is what the greedy scan produces.  Sums are compared as exact rationals
    so float rounding can never flip a comparison.
    """
    pre = inst.pre()
    if node_id not in pre.node_index:
        raise InstanceError(f"unknown node id {node_id}")
    b = pre.node_index[node_id]
    in_v = _rank_flags(pre, subset)
    pool = [r for r in pre.members_ranks[b] if in_v[r]]
    if len(pool) > BRUTE_FORCE_LIMIT:
        raise ValueError(
            f"brute-force oracle limited to {BRUTE_FORCE_LIMIT} elements, got {len(pool)}"
        )
    depth_b = pre.depth[b]
    counts = [0] * len(pre.mu)
    best_sum = Fraction(0)
    best_seq: tuple[int, ...] = ()
    cur: list[int] = []

    def walk(idx: int, cur_sum: Fraction) -> None:
        nonlocal best_sum, best_seq
        if idx == len(pool):
            if cur_sum > best_sum or (cur_sum == best_sum and tuple(cur) < best_seq):
                best_sum, best_seq = cur_sum, tuple(cur)
            return
        r = pool[idx]
        ch = pre.chain_by_rank[r]
        cut = len(ch) - depth_b
        if all(counts[nx] < pre.mu[nx] for nx in ch[:cut]):
            for nx in ch[:cut]:
                counts[nx] += 1
            cur.append(r)
            walk(idx + 1, cur_sum + Fraction(pre.w_by_rank[r]))
            cur.pop()
            for nx in ch[:cut]:
                counts[nx] -= 1
        walk(idx + 1, cur_sum)

    walk(0, Fraction(0))
    return _ranked_optimum(inst, node_id, list(best_seq))
