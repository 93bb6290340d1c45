"""Shared instance builders and run-replay checks for the test suite."""

import json

from laminar_secretary import (
    Element,
    FamilyNode,
    GenSpec,
    generate,
    load_instance,
    make_instance,
)

# The documented four-element example: two heavy elements share a unit-capacity
# inner node, two lighter ones sit directly under the root.
FOUR_ELEMENT_TEXT = json.dumps(
    {
        "name": "four",
        "elements": [
            {"id": 0, "weight": 10},
            {"id": 1, "weight": 7},
            {"id": 2, "weight": 5},
            {"id": 3, "weight": 2},
        ],
        "nodes": [
            {"id": 0, "capacity": 3, "parent": None},
            {"id": 1, "capacity": 1, "parent": 0},
        ],
        "membership": {"0": 1, "1": 1, "2": 0, "3": 0},
    }
)


def four_element():
    return load_instance(FOUR_ELEMENT_TEXT)


def rank1(weights, capacity=1, name="rank1"):
    """Single-node instance: select at most ``capacity`` of the elements."""
    elements = [Element(i, float(w)) for i, w in enumerate(weights)]
    nodes = [FamilyNode(0, capacity, None)]
    return make_instance(name, elements, nodes, {i: 0 for i in range(len(weights))})


def tree(name, node_specs, membership, weights):
    """Builder from raw parts: ``node_specs`` is [(id, capacity, parent)]."""
    elements = [Element(i, float(w)) for i, w in enumerate(weights)]
    nodes = [FamilyNode(nid, cap, par) for nid, cap, par in node_specs]
    return make_instance(name, elements, nodes, dict(membership))


def mixed_instances(count, seed0=0, n_lo=4, n_hi=12):
    """Deterministic list of instances cycling families, sizes, and weight
    regimes; the workhorse pool for randomized invariants."""
    out = []
    families = ("random_tree", "uniform", "partition", "chain", "random_tree")
    weights = ("uniform", "exponential", "near_ties", "power_law")
    for i in range(count):
        n = n_lo + (seed0 + i) % (n_hi - n_lo + 1)
        family = families[i % len(families)]
        kind = weights[i % len(weights)]
        spec = GenSpec(
            family,
            n,
            seed=seed0 + 1000 + i,
            weights=kind,
            rank=max(1, n // 3) if family == "uniform" else None,
            parts=2 + i % 2 if family == "partition" else None,
            part_capacity=1 + i % 2,
            depth=2 + i % 2 if family == "chain" else None,
        )
        out.append(generate(spec))
    return out


def enumerable_suite():
    """Twenty enumeration-friendly instances (n <= 7) across all families."""
    specs = [
        GenSpec("uniform", 4, 101, "uniform", rank=1),
        GenSpec("uniform", 5, 102, "exponential", rank=2),
        GenSpec("uniform", 6, 103, "power_law", rank=3),
        GenSpec("uniform", 7, 104, "near_ties", rank=2),
        GenSpec("uniform", 7, 105, "uniform", rank=4),
        GenSpec("partition", 5, 106, "uniform", parts=2),
        GenSpec("partition", 6, 107, "exponential", parts=3),
        GenSpec("partition", 7, 108, "uniform", parts=2, part_capacity=2),
        GenSpec("partition", 7, 109, "near_ties", parts=3),
        GenSpec("chain", 5, 110, "uniform", depth=2),
        GenSpec("chain", 6, 111, "exponential", depth=3),
        GenSpec("chain", 7, 112, "uniform", depth=3),
        GenSpec("chain", 7, 113, "power_law", depth=2),
        GenSpec("chain", 6, 114, "near_ties", depth=2),
        GenSpec("random_tree", 6, 115),
        GenSpec("random_tree", 7, 116, "exponential"),
        GenSpec("random_tree", 7, 117, "near_ties"),
        GenSpec("random_tree", 6, 118, "power_law"),
        GenSpec("random_tree", 7, 119),
        GenSpec("random_tree", 5, 120, "uniform"),
    ]
    return [generate(s) for s in specs]


def replay_events(inst, result):
    """Re-derive the reference-set evolution from the event log.

    Asserts, at every accept, that the evicted element was the heaviest
    reference element strictly lighter than the arrival, and at every break
    that no lighter reference element remained.  Returns the reconstructed
    final reference sets.
    """
    assert result.events is not None, "replay needs a traced run"
    refs = {nid: list(ids) for nid, ids in result.initial_refsets.items()}
    for ev in result.events:
        key = inst.key(ev.element)
        below = [x for x in refs[ev.node] if inst.key(x) > key]
        if ev.action == "accept":
            assert below, "accepted with no lighter reference element"
            heaviest_below = min(below, key=inst.key)
            assert ev.evicted == heaviest_below, "evicted element was not the heaviest below"
            refs[ev.node].remove(ev.evicted)
        else:
            assert ev.action == "break"
            assert not below, "broke while a lighter reference element remained"
    for nid, ids in result.final_refsets.items():
        assert sorted(refs[nid]) == sorted(ids)
    return refs


def check_run_invariants(inst, result):
    """Structural invariants every run must satisfy."""
    from laminar_secretary import is_independent

    assert is_independent(inst, result.sol_root)
    members = {nid: inst.members(nid) for nid in (nd.id for nd in inst.nodes)}
    for nd in inst.nodes:
        sol_b = result.sol_per_node[nd.id]
        assert len(sol_b) <= nd.capacity
        # conservation: every acceptance at a node evicted exactly one element
        assert len(result.initial_refsets[nd.id]) - len(result.final_refsets[nd.id]) == len(sol_b)
        # root acceptance implies acceptance at every node on the chain
        assert set(result.sol_root) & members[nd.id] <= set(sol_b)
