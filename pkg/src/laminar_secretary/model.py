"""Domain model: weighted elements under a laminar family of capacity limits.

A laminar family is a collection of subsets of the ground set in which any
two members are either nested or disjoint, so the family forms a rooted tree
whose root is the whole ground set.  Every family set carries a positive
integer capacity; a selection is feasible when no set's capacity is exceeded
by the selected elements inside it.

Elements attach to their *minimal* containing set only; membership in every
larger set follows from the tree (an element belongs to a node's set iff its
minimal node lies in that node's subtree).

Instances are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


class InstanceError(ValueError):
    """An instance file or structure violates a model invariant."""


@dataclass(frozen=True)
class Element:
    """A ground-set element.  Virtual elements are zero-weight placeholders
    created internally for capacity padding; they never appear in files."""

    id: int
    weight: float
    virtual: bool = False


@dataclass(frozen=True)
class FamilyNode:
    """One set of the laminar family, stored as a tree node."""

    id: int
    capacity: int
    parent: int | None
    children: tuple[int, ...] = ()


def order_key(weight: float, element_id: int) -> tuple[float, int]:
    """Strict total order over elements: heavier first, smaller id breaking
    ties.  Equal raw weights are legal input; the id tie-break plays the role
    of an infinitesimal perturbation and is used consistently everywhere."""
    return (-weight, element_id)


class _Pre:
    """Per-instance precomputed tables (rank-space views of the tree).

    Ranks number the real elements 0..n-1 in weight order (rank 0 is the
    heaviest).  ``x`` is lighter than ``y`` iff rank(x) > rank(y).  Virtual
    padding slots are addressed by ranks >= n_real, one block per node, so
    they sort below every real element.
    """

    __slots__ = (
        "ids_by_rank", "rank_by_id", "w_by_rank", "n_real", "max_id",
        "node_ids", "node_index", "mu", "parent", "depth", "node_chain",
        "members_ranks", "chain_by_rank", "root_idx", "virtual_rank_base",
    )

    def __init__(self, inst: "LaminarInstance"):
        ranked = sorted(inst.elements, key=lambda e: order_key(e.weight, e.id))
        self.ids_by_rank = [e.id for e in ranked]
        self.rank_by_id = {e.id: r for r, e in enumerate(ranked)}
        self.w_by_rank = [e.weight for e in ranked]
        self.n_real = len(ranked)
        self.max_id = max((e.id for e in inst.elements), default=-1)

        self.node_ids = [nd.id for nd in inst.nodes]
        self.node_index = {nid: i for i, nid in enumerate(self.node_ids)}
        self.mu = [nd.capacity for nd in inst.nodes]
        self.parent = [
            self.node_index[nd.parent] if nd.parent is not None else -1
            for nd in inst.nodes
        ]
        self.root_idx = next(i for i, p in enumerate(self.parent) if p < 0)

        depth = [-1] * len(inst.nodes)
        chains: list[tuple[int, ...]] = [()] * len(inst.nodes)

        def resolve(i: int) -> tuple[int, ...]:
            if depth[i] >= 0:
                return chains[i]
            if self.parent[i] < 0:
                depth[i] = 0
                chains[i] = (i,)
            else:
                up = resolve(self.parent[i])
                depth[i] = len(up)
                chains[i] = (i,) + up
            return chains[i]

        for i in range(len(inst.nodes)):
            resolve(i)
        self.depth = depth
        self.node_chain = chains

        self.chain_by_rank = [
            chains[self.node_index[inst.membership[eid]]]
            for eid in self.ids_by_rank
        ]
        members: list[list[int]] = [[] for _ in inst.nodes]
        for r, ch in enumerate(self.chain_by_rank):
            for b in ch:
                members[b].append(r)
        self.members_ranks = members

        base, acc = [], self.n_real
        for cap in self.mu:
            base.append(acc)
            acc += cap
        self.virtual_rank_base = base

    def virtual_id(self, vrank: int) -> int:
        return self.max_id + 1 + (vrank - self.n_real)


@dataclass(eq=False)
class LaminarInstance:
    """A named ground set with weights plus the rooted capacity tree.

    ``membership`` maps each element id to the id of its minimal containing
    node.  Treat instances as frozen once built.
    """

    name: str
    elements: tuple[Element, ...]
    nodes: tuple[FamilyNode, ...]
    membership: dict[int, int]
    _pre: _Pre | None = field(default=None, repr=False, compare=False)

    def pre(self) -> _Pre:
        if self._pre is None:
            self._pre = _Pre(self)
        return self._pre

    # -- lookups ----------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.elements)

    @property
    def root_id(self) -> int:
        return self.pre().node_ids[self.pre().root_idx]

    def element(self, element_id: int) -> Element:
        for e in self.elements:
            if e.id == element_id:
                return e
        raise InstanceError(f"unknown element id {element_id}")

    def node(self, node_id: int) -> FamilyNode:
        for nd in self.nodes:
            if nd.id == node_id:
                return nd
        raise InstanceError(f"unknown node id {node_id}")

    def weight(self, element_id: int) -> float:
        return self.element(element_id).weight

    def key(self, element_id: int) -> tuple[float, int]:
        """Order key for a real or virtual element id.  Ids beyond the real
        range are virtual and carry weight zero, so they sort last."""
        pre = self.pre()
        if element_id in pre.rank_by_id:
            return order_key(self.weight(element_id), element_id)
        return order_key(0.0, element_id)

    def minimal_node(self, element_id: int) -> int:
        try:
            return self.membership[element_id]
        except KeyError:
            raise InstanceError(f"unknown element id {element_id}") from None

    def members(self, node_id: int) -> frozenset[int]:
        """All element ids contained in the node's set (subtree closure)."""
        pre = self.pre()
        b = pre.node_index[node_id]
        return frozenset(pre.ids_by_rank[r] for r in pre.members_ranks[b])

    def element_ids(self) -> frozenset[int]:
        return frozenset(e.id for e in self.elements)


# -- construction and validation -------------------------------------------


def make_instance(name, elements, nodes, membership) -> LaminarInstance:
    """Validate and assemble an instance; children links are recomputed."""
    elements = tuple(sorted(elements, key=lambda e: e.id))
    seen: set[int] = set()
    for e in elements:
        if not isinstance(e.id, int) or e.id < 0:
            raise InstanceError(f"element id must be a non-negative integer: {e.id!r}")
        if e.id in seen:
            raise InstanceError(f"duplicate element id {e.id}")
        seen.add(e.id)
        if e.virtual:
            raise InstanceError(f"element {e.id}: virtual elements are internal only")
        if not e.weight > 0:
            raise InstanceError(f"element {e.id}: non-positive weight")

    raw = {}
    for nd in nodes:
        if not isinstance(nd.id, int) or nd.id < 0:
            raise InstanceError(f"node id must be a non-negative integer: {nd.id!r}")
        if nd.id in raw:
            raise InstanceError(f"duplicate node id {nd.id}")
        if nd.capacity <= 0:
            raise InstanceError(f"node {nd.id}: non-positive capacity")
        raw[nd.id] = nd
    if not raw:
        raise InstanceError("no root node (empty family)")

    roots = [nid for nid, nd in raw.items() if nd.parent is None]
    if len(roots) > 1:
        raise InstanceError(f"multiple roots (nodes {roots[0]} and {roots[1]})")
    if not roots:
        raise InstanceError("no root node")
    children: dict[int, list[int]] = {nid: [] for nid in raw}
    for nd in raw.values():
        if nd.parent is not None:
            if nd.parent not in raw:
                raise InstanceError(f"node {nd.id}: unknown parent {nd.parent}")
            children[nd.parent].append(nd.id)
    # every node must reach the root, otherwise the parent links hold a cycle
    for nid, nd in raw.items():
        hops, cur = 0, nd
        while cur.parent is not None:
            cur = raw[cur.parent]
            hops += 1
            if hops > len(raw):
                raise InstanceError(f"node {nid}: cycle in parent links")

    membership = dict(membership)
    for eid in membership:
        if eid not in seen:
            raise InstanceError(f"membership: unknown element {eid}")
    for e in elements:
        if e.id not in membership:
            raise InstanceError(f"element {e.id} not assigned to any node")
        if membership[e.id] not in raw:
            raise InstanceError(
                f"element {e.id}: membership references unknown node {membership[e.id]}"
            )

    linked = tuple(
        FamilyNode(nd.id, nd.capacity, nd.parent, tuple(sorted(children[nd.id])))
        for nd in sorted(raw.values(), key=lambda x: x.id)
    )
    return LaminarInstance(str(name), elements, linked, membership)


def load_instance(text: str) -> LaminarInstance:
    """Parse and validate the JSON instance format (see README)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed instance text: {exc}") from None
    if not isinstance(doc, dict):
        raise InstanceError("malformed instance text: top level must be an object")
    for key in ("name", "elements", "nodes", "membership"):
        if key not in doc:
            raise InstanceError(f"missing field '{key}'")
    try:
        elements = [Element(int(e["id"]), float(e["weight"])) for e in doc["elements"]]
        nodes = [
            FamilyNode(
                int(nd["id"]),
                int(nd["capacity"]),
                None if nd["parent"] is None else int(nd["parent"]),
            )
            for nd in doc["nodes"]
        ]
        membership = {int(k): int(v) for k, v in doc["membership"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"malformed instance text: {exc}") from None
    return make_instance(doc["name"], elements, nodes, membership)


def dump_instance(inst: LaminarInstance) -> str:
    """Canonical JSON serialization; loading it back round-trips exactly."""
    doc = {
        "name": inst.name,
        "elements": [{"id": e.id, "weight": e.weight} for e in inst.elements],
        "nodes": [
            {"id": nd.id, "capacity": nd.capacity, "parent": nd.parent}
            for nd in inst.nodes
        ],
        "membership": {str(k): inst.membership[k] for k in sorted(inst.membership)},
    }
    return json.dumps(doc, sort_keys=True, indent=1)


# -- structure operations ----------------------------------------------------


def chain(inst: LaminarInstance, from_node: int, to_node: int) -> list[int]:
    """Node ids from ``from_node`` up to ``to_node`` following parent links,
    both ends included.  ``from_node`` must lie inside ``to_node``."""
    pre = inst.pre()
    if from_node not in pre.node_index:
        raise InstanceError(f"unknown node id {from_node}")
    if to_node not in pre.node_index:
        raise InstanceError(f"unknown node id {to_node}")
    out = []
    for b in pre.node_chain[pre.node_index[from_node]]:
        out.append(pre.node_ids[b])
        if pre.node_ids[b] == to_node:
            return out
    raise InstanceError(f"node {from_node} is not contained in node {to_node}")


def normalize_family(inst: LaminarInstance) -> LaminarInstance:
    """Drop capacity-redundant nodes.

    A node whose capacity is at least the capacity of one of its proper
    ancestors can never be the binding constraint, so it is removed and the
    elements attached to it move to the nearest surviving ancestor.  The
    feasible-set family is unchanged and the surviving tree has strictly
    increasing capacities toward the root.
    """
    by_id = {nd.id: nd for nd in inst.nodes}
    removed: set[int] = set()
    for nd in inst.nodes:
        cur = nd.parent
        while cur is not None:
            if by_id[cur].capacity <= nd.capacity:
                removed.add(nd.id)
                break
            cur = by_id[cur].parent
    if not removed:
        return make_instance(inst.name, inst.elements, inst.nodes, inst.membership)

    def surviving(node_id: int) -> int:
        while node_id in removed:
            node_id = by_id[node_id].parent  # root is never removed
        return node_id

    nodes = [
        FamilyNode(nd.id, nd.capacity, surviving(nd.parent) if nd.parent is not None else None)
        for nd in inst.nodes
        if nd.id not in removed
    ]
    membership = {eid: surviving(nid) for eid, nid in inst.membership.items()}
    return make_instance(inst.name, inst.elements, nodes, membership)
