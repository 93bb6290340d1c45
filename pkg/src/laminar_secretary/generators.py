"""Seeded generation of instance families.

Four tree shapes (single capacity node, disjoint parts under a slack root,
a nested chain, and a random tree) crossed with four weight regimes.  All
construction is deterministic in the seed, always passes model validation,
and emits strictly increasing capacities toward the root so normalization is
a no-op.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model import Element, FamilyNode, LaminarInstance, make_instance

FAMILIES = ("uniform", "partition", "chain", "random_tree")
WEIGHTS = ("uniform", "exponential", "power_law", "near_ties")


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int
    seed: int
    weights: str = "uniform"
    rank: int | None = None          # uniform: the single capacity
    parts: int | None = None         # partition: number of parts
    part_capacity: int = 1           # partition: capacity of each part
    depth: int | None = None         # chain: number of nested nodes
    max_branching: int = 3           # random_tree: children per node limit
    power_exponent: float = 2.0      # power_law shape


def _draw_weight(rnd: random.Random, kind: str, exponent: float) -> float:
    if kind == "uniform":
        return 1.0 - rnd.random()  # (0, 1]
    if kind == "exponential":
        w = rnd.expovariate(1.0)
        while w <= 0.0:
            w = rnd.expovariate(1.0)
        return w
    if kind == "power_law":
        return rnd.paretovariate(exponent)
    if kind == "near_ties":
        return rnd.choice((1.0, 2.0, 3.0))
    raise ValueError(f"unknown weight distribution {kind!r}")


def generate(spec: GenSpec) -> LaminarInstance:
    """Build the instance described by ``spec``; identical specs give
    structurally identical instances."""
    if spec.family not in FAMILIES:
        raise ValueError(f"unknown family {spec.family!r}")
    if spec.weights not in WEIGHTS:
        raise ValueError(f"unknown weight distribution {spec.weights!r}")
    if spec.n < 1:
        raise ValueError(f"need at least one element, got n={spec.n}")
    rnd = random.Random(spec.seed)

    if spec.family == "uniform":
        k = spec.rank if spec.rank is not None else min(3, spec.n)
        if not 1 <= k <= spec.n:
            raise ValueError(f"rank must satisfy 1 <= k <= n, got k={k}, n={spec.n}")
        nodes = [FamilyNode(0, k, None)]
        membership = {i: 0 for i in range(spec.n)}

    elif spec.family == "partition":
        parts = spec.parts if spec.parts is not None else 2
        cap = spec.part_capacity
        if parts < 1 or cap < 1:
            raise ValueError(f"need parts >= 1 and part capacity >= 1, got {parts}, {cap}")
        root_cap = parts * cap if parts > 1 else cap + 1
        nodes = [FamilyNode(0, root_cap, None)]
        nodes += [FamilyNode(j, cap, 0) for j in range(1, parts + 1)]
        membership = {i: 1 + rnd.randrange(parts) for i in range(spec.n)}

    elif spec.family == "chain":
        depth = spec.depth if spec.depth is not None else 3
        if depth < 1:
            raise ValueError(f"chain depth must be >= 1, got {depth}")
        caps = [rnd.randint(1, 2)]
        for _ in range(depth - 1):
            caps.append(caps[-1] + rnd.randint(1, 2))
        caps.reverse()  # caps[0] largest -> root
        nodes = [FamilyNode(j, caps[j], None if j == 0 else j - 1) for j in range(depth)]
        membership = {i: rnd.randrange(depth) for i in range(spec.n)}

    else:  # random_tree
        if spec.max_branching < 1:
            raise ValueError(f"max branching must be >= 1, got {spec.max_branching}")
        target = rnd.randint(1, min(8, max(1, spec.n)))
        caps = [rnd.randint(2, max(2, spec.n))]
        parents: list[int | None] = [None]
        kids = [0]
        for j in range(1, target):
            open_nodes = [
                x for x in range(j)
                if caps[x] >= 2 and kids[x] < spec.max_branching
            ]
            if not open_nodes:
                break
            par = rnd.choice(open_nodes)
            caps.append(rnd.randint(1, caps[par] - 1))
            parents.append(par)
            kids[par] += 1
            kids.append(0)
        nodes = [FamilyNode(j, caps[j], parents[j]) for j in range(len(caps))]
        membership = {i: rnd.randrange(len(caps)) for i in range(spec.n)}

    elements = [
        Element(i, _draw_weight(rnd, spec.weights, spec.power_exponent))
        for i in range(spec.n)
    ]
    name = f"{spec.family}-n{spec.n}-s{spec.seed}"
    return make_instance(name, elements, nodes, membership)
