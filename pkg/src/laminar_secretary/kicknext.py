"""The KickNext online selection rule.

A run splits the ground set into a sample phase and a selection phase: each
element lands in the sample independently with probability ``1 - p`` and the
remaining elements arrive one by one in uniformly random order.  (This joint
law matches drawing the sample size from Binom(n, 1-p) and taking that prefix
of a uniform permutation, since only the sample *set* and the relative order
of the rest are ever observed.)

From the sample, every family node gets a reference set: the sample optimum
restricted to that node, optionally padded with zero-weight virtual elements
up to the node's capacity.  An arriving element is then pushed through the
chain of nodes from its minimal set to the root.  At each node it is accepted
iff the reference set still holds some lighter element, in which case the
*heaviest* reference element lighter than the arrival is evicted; otherwise
the chain walk stops and the element is rejected from the overall solution.
Acceptances at inner nodes are kept even when an outer node rejects — the
walk never rolls back.  The run's output is the root's accepted list.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass
from typing import Mapping, Sequence

from .model import InstanceError, LaminarInstance, chain
from .matroid import _greedy_ranks, _rank_flags


@dataclass(frozen=True)
class Trial:
    """One seeded randomness realization: the sample set and the arrival
    order of the remaining elements.  Rebuilding from the same seed
    reproduces both bit-exactly."""

    seed: int
    p: float
    sample_set: frozenset[int]
    arrival_order: tuple[int, ...]


@dataclass(frozen=True)
class RunConfig:
    padding: bool = True
    trace: bool = False


@dataclass(frozen=True)
class TraceEvent:
    step: int
    element: int
    node: int
    action: str  # "accept" or "break"
    evicted: int | None
    evicted_virtual: bool


@dataclass(frozen=True)
class BreakRecord:
    """Where an arriving element's chain walk stopped.  ``initial_below``
    counts the reference elements lighter than it at phase start; at a break
    every one of them has already been evicted."""

    node: int
    step: int
    initial_below: int


@dataclass
class RunResult:
    sol_root: tuple[int, ...]
    sol_per_node: dict[int, tuple[int, ...]]
    initial_refsets: dict[int, tuple[int, ...]]
    final_refsets: dict[int, tuple[int, ...]]
    breaks: dict[int, BreakRecord]
    events: tuple[TraceEvent, ...] | None = None

    def initial_ref_sizes(self) -> dict[int, int]:
        return {nid: len(v) for nid, v in self.initial_refsets.items()}


def make_trial(inst: LaminarInstance, p: float, seed: int) -> Trial:
    """Draw the sample/selection split and the arrival order from a seed."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"selection probability p must be in (0, 1), got {p}")
    rnd = random.Random(seed)
    sample, arrivals = _sample_ids(inst, p, rnd)
    return Trial(seed, p, frozenset(sample), tuple(arrivals))


def _sample_ids(inst: LaminarInstance, p: float, rnd: random.Random):
    """Element ids split into (sample, shuffled arrivals); ids are visited in
    increasing order so the draw depends only on the seed."""
    sample: list[int] = []
    arrivals: list[int] = []
    for e in inst.elements:  # stored sorted by id
        (sample if rnd.random() < 1.0 - p else arrivals).append(e.id)
    rnd.shuffle(arrivals)
    return sample, arrivals


def _ref_rank_lists(pre, in_s, padding: bool) -> list[list[int]]:
    """Reference sets per node index as ascending rank lists (heaviest
    first); virtual ranks fill the tail up to capacity when padding."""
    refs = []
    for b in range(len(pre.mu)):
        chosen = _greedy_ranks(pre, in_s, b)
        if padding:
            base = pre.virtual_rank_base[b]
            chosen.extend(range(base + len(chosen), base + pre.mu[b]))
        refs.append(chosen)
    return refs


def reference_sets(inst: LaminarInstance, sample, padding: bool = True) -> dict[int, list[int]]:
    """Per-node reference sets as element ids sorted lightest-first.
    Virtual padding elements get fresh ids above every real id."""
    pre = inst.pre()
    refs = _ref_rank_lists(pre, _rank_flags(pre, sample), padding)
    out = {}
    for b, ranks in enumerate(refs):
        ids = [
            pre.ids_by_rank[r] if r < pre.n_real else pre.virtual_id(r)
            for r in reversed(ranks)
        ]
        out[pre.node_ids[b]] = ids
    return out


def _run_weight(pre, in_s, order_ranks, padding: bool, refs_template=None) -> float:
    """Total weight accepted at the root; the lean core shared by the
    Monte Carlo and enumeration paths."""
    if refs_template is None:
        refs = _ref_rank_lists(pre, in_s, padding)
    else:
        refs = [list(x) for x in refs_template]
    w = pre.w_by_rank
    total = 0.0
    for r in order_ranks:
        for b in pre.chain_by_rank[r]:
            R = refs[b]
            i = bisect_right(R, r)
            if i == len(R):
                break
            R.pop(i)
        else:
            total += w[r]
    return total


def run_kicknext(inst: LaminarInstance, trial: Trial, config: RunConfig = RunConfig()) -> RunResult:
    """Execute one full run and report per-node acceptances, reference-set
    evolution, break records, and (optionally) the per-step event trace."""
    pre = inst.pre()
    in_s = [False] * pre.n_real
    for eid in trial.sample_set:
        r = pre.rank_by_id.get(eid)
        if r is None:
            raise InstanceError(f"unknown element id {eid}")
        in_s[r] = True
    order_ranks = [pre.rank_by_id[eid] for eid in trial.arrival_order]

    refs = _ref_rank_lists(pre, in_s, config.padding)
    initial = [tuple(x) for x in refs]
    sol: list[list[int]] = [[] for _ in pre.mu]
    breaks: dict[int, BreakRecord] = {}
    events: list[TraceEvent] | None = [] if config.trace else None

    def as_id(rank: int) -> int:
        return pre.ids_by_rank[rank] if rank < pre.n_real else pre.virtual_id(rank)

    for step, r in enumerate(order_ranks):
        eid = pre.ids_by_rank[r]
        for b in pre.chain_by_rank[r]:
            R = refs[b]
            i = bisect_right(R, r)
            if i == len(R):
                breaks[eid] = BreakRecord(
                    pre.node_ids[b], step, sum(1 for x in initial[b] if x > r)
                )
                if events is not None:
                    events.append(TraceEvent(step, eid, pre.node_ids[b], "break", None, False))
                break
            evicted = R.pop(i)
            sol[b].append(r)
            if events is not None:
                events.append(
                    TraceEvent(
                        step, eid, pre.node_ids[b], "accept",
                        as_id(evicted), evicted >= pre.n_real,
                    )
                )

    def ids_ascending_weight(ranks) -> tuple[int, ...]:
        return tuple(as_id(r) for r in sorted(ranks, reverse=True))

    return RunResult(
        sol_root=tuple(pre.ids_by_rank[r] for r in sol[pre.root_idx]),
        sol_per_node={pre.node_ids[b]: tuple(pre.ids_by_rank[r] for r in sol[b]) for b in range(len(sol))},
        initial_refsets={pre.node_ids[b]: ids_ascending_weight(initial[b]) for b in range(len(initial))},
        final_refsets={pre.node_ids[b]: ids_ascending_weight(refs[b]) for b in range(len(refs))},
        breaks=breaks,
        events=tuple(events) if events is not None else None,
    )


def qualifies(inst: LaminarInstance, element_id: int, node_id: int,
              refsets: Mapping[int, Sequence[int]]) -> bool:
    """True iff the element outweighs the lightest reference element at every
    node on its chain up to ``node_id``.  Only such elements can ever be
    accepted at (or evict from) that node.  Empty reference sets disqualify.
    """
    pre = inst.pre()
    if element_id not in pre.rank_by_id:
        raise InstanceError(f"unknown element id {element_id}")
    own = pre.chain_by_rank[pre.rank_by_id[element_id]]
    if node_id not in pre.node_index or pre.node_index[node_id] not in own:
        raise InstanceError(f"element {element_id} is not contained in node {node_id}")
    key = inst.key(element_id)
    for nid in chain(inst, inst.membership[element_id], node_id):
        ids = refsets.get(nid, ())
        if not ids:
            return False
        lightest = max(inst.key(x) for x in ids)
        if not lightest > key:
            return False
    return True


def trace_csv(result: RunResult) -> str:
    """Event log as CSV: step, element_id, node_id, action, evicted_id,
    evicted_virtual."""
    if result.events is None:
        raise ValueError("run was executed without trace=True")
    lines = ["step,element_id,node_id,action,evicted_id,evicted_virtual"]
    for ev in result.events:
        evicted = "" if ev.evicted is None else str(ev.evicted)
        lines.append(
            f"{ev.step},{ev.element},{ev.node},{ev.action},{evicted},{int(ev.evicted_virtual)}"
        )
    return "\n".join(lines) + "\n"
