"""Closed-form quantities behind the KickNext competitive-ratio guarantee.

For a selection-phase probability p < 1/2 the analysis runs on two derived
constants,

    alpha = (p + (1-p) ln(1-p)) / (2 (1-p) p^2)       (alpha -> 1/4 as p -> 0)
    c     = 4 p (1-p),

and bounds the probability that an optimum element finds all of its lighter
reference elements already evicted by  alpha c^(d+1) / (1-c),  where d is the
element's backward rank at the node in question.  Summing those failure
probabilities through a geometric-decay argument yields the guarantee

    E[solution weight] >= p (1 - 2 alpha c / (1-c)^2) * optimum weight,

which evaluates to a touch above 0.053 at p = 0.08.

Backward ranks here are taken in the capacity-padded view: every per-node
optimum is conceptually filled up to the node's capacity with zero-weight
virtual elements.  Without that convention the per-node geometric sums are
simply false on sparse instances (a lone element under k nested capacities
would contribute k*c instead of c + c^2 + ... + c^k).  All logarithms are
natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import LaminarInstance, chain
from .matroid import RankedOptimum, greedy_opt


@dataclass(frozen=True)
class TheoryParams:
    p: float
    alpha: float
    c: float
    c_geo: float  # c / (1-c), the limit of the partial sums c + c^2 + ...


def theory_params(p: float) -> TheoryParams:
    """Derived analysis constants; requires 0 < p < 1/2."""
    if not 0.0 < p < 0.5:
        raise ValueError(f"p must be in (0, 1/2), got {p}")
    alpha = (p + (1.0 - p) * math.log1p(-p)) / (2.0 * (1.0 - p) * p * p)
    c = 4.0 * p * (1.0 - p)
    return TheoryParams(p, alpha, c, c / (1.0 - c))


def allkicked_bound(params: TheoryParams, d: int) -> float:
    """Failure-probability bound alpha * c^(d+1) / (1-c) for an element of
    backward rank d; strictly decreasing in d."""
    if d < 0:
        raise ValueError(f"backward rank must be non-negative, got {d}")
    return params.alpha * params.c ** (d + 1) / (1.0 - params.c)


def rel_ent(x: float, y: float) -> float:
    """Relative entropy x ln(x/y) + (1-x) ln((1-x)/(1-y)), with the usual
    0 ln 0 = 0 convention.  Diagnostic helper for tail-bound work."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    if not 0.0 < y < 1.0:
        raise ValueError(f"y must be in (0, 1), got {y}")
    out = 0.0
    if x > 0.0:
        out += x * math.log(x / y)
    if x < 1.0:
        out += (1.0 - x) * math.log((1.0 - x) / (1.0 - y))
    return out


def geometric_sum(c: float, i: int) -> float:
    """c + c^2 + ... + c^i in closed form (0 for i = 0)."""
    if i < 0:
        raise ValueError(f"sum length must be non-negative, got {i}")
    if i == 0:
        return 0.0
    return c * (1.0 - c ** i) / (1.0 - c)


def _node_optima(inst: LaminarInstance) -> dict[int, RankedOptimum]:
    return {nid: greedy_opt(inst, None, nid) for nid in inst.pre().node_ids}


def _padded_brank(inst, opts, element_id: int, node_id: int) -> int:
    """Backward rank of an element against the node's padded optimum: real
    optimum elements lighter than it, plus one per unfilled capacity slot."""
    opt = opts[node_id]
    key = inst.key(element_id)
    below = sum(1 for eid in opt.elements if inst.key(eid) > key)
    deficit = inst.node(node_id).capacity - len(opt)
    return below + deficit


def g_exact(inst: LaminarInstance, m: int, node_id: int, c: float) -> float:
    """Exact chain-decay sum for the m heaviest optimum elements of a node:
    each contributes c^(1 + backward rank) at every node of its chain up to
    ``node_id``."""
    if not 0.0 < c < 1.0:
        raise ValueError(f"c must be in (0, 1), got {c}")
    opt = greedy_opt(inst, None, node_id)  # also validates node_id
    if not 0 <= m <= len(opt):
        raise ValueError(f"m must be within 0..{len(opt)}, got {m}")
    opts = _node_optima(inst)
    total = 0.0
    for eid in opt.elements[len(opt) - m:]:  # ascending list; last m are heaviest
        for nid in chain(inst, inst.membership[eid], node_id):
            total += c ** (1 + _padded_brank(inst, opts, eid, nid))
    return total


def g_refined_bound(m: int, k: int, c: float) -> float:
    """Sharper per-node bound 2 c_1 + ... + 2 c_{m-1} + c_m + c_m c_{k-m},
    where c_i = c + ... + c^i and k is the node capacity."""
    if not 0 <= m <= k:
        raise ValueError(f"need 0 <= m <= k, got m={m}, k={k}")
    if not 0.0 < c < 0.5:
        raise ValueError(f"c must be in (0, 1/2), got {c}")
    if m == 0:
        return 0.0
    total = 2.0 * sum(geometric_sum(c, j) for j in range(1, m))
    cm = geometric_sum(c, m)
    return total + cm + cm * geometric_sum(c, k - m)


def g_weak_bound(m: int, c: float) -> float:
    """The simpler bound 2c/(1-c) * m implied by the refined one."""
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    if not 0.0 < c < 0.5:
        raise ValueError(f"c must be in (0, 1/2), got {c}")
    return 2.0 * c / (1.0 - c) * m


def weighted_penalty(inst: LaminarInstance, c: float) -> float:
    """Weighted chain-decay sum over the global optimum:
    sum_i w(i) * sum over i's chain of c^(1 + backward rank).  Bounded by
    2c/(1-c) times the optimum weight whenever c < 1/2."""
    if not 0.0 < c < 0.5:
        raise ValueError(f"c must be in (0, 1/2), got {c}")
    opts = _node_optima(inst)
    root = inst.root_id
    total = 0.0
    for eid in opts[root].elements:
        decay = 0.0
        for nid in chain(inst, inst.membership[eid], root):
            decay += c ** (1 + _padded_brank(inst, opts, eid, nid))
        total += inst.weight(eid) * decay
    return total


def weighted_penalty_telescoped(inst: LaminarInstance, c: float) -> float:
    """The same weighted sum assembled from unweighted prefix sums: sort the
    optimum heaviest-first and pay each weight *difference* once per prefix.
    Agrees with ``weighted_penalty`` exactly; used as a cross-check."""
    if not 0.0 < c < 0.5:
        raise ValueError(f"c must be in (0, 1/2), got {c}")
    root = inst.root_id
    opt = greedy_opt(inst, None, root)
    ws = [inst.weight(eid) for eid in reversed(opt.elements)]  # heaviest first
    total = 0.0
    for l in range(1, len(ws) + 1):
        nxt = ws[l] if l < len(ws) else 0.0
        total += (ws[l - 1] - nxt) * g_exact(inst, l, root, c)
    return total


def ratio_lower_bound(p: float) -> float:
    """Guaranteed fraction of the optimum weight collected in expectation:
    p * (1 - 2 alpha c / (1-c)^2)."""
    t = theory_params(p)
    return p * (1.0 - 2.0 * t.alpha * t.c / (1.0 - t.c) ** 2)


def best_p(step: float, p_min: float | None = None, p_max: float | None = None):
    """Grid argmax of the ratio lower bound.  The default grid is the
    positive multiples of ``step`` below 1/2."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    if p_min is None:
        grid = []
        k = 1
        while k * step < 0.5:
            grid.append(k * step)
            k += 1
    else:
        hi = p_max if p_max is not None else p_min
        grid = []
        k = 0
        while p_min + k * step <= hi + 1e-12:
            q = p_min + k * step
            if 0.0 < q < 0.5:
                grid.append(q)
            k += 1
    if not grid:
        raise ValueError("empty search grid")
    best = max(grid, key=ratio_lower_bound)
    return best, ratio_lower_bound(best)
