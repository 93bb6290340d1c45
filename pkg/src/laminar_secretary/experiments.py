"""Empirical verification harness.

Everything here is seeded and reproducible: trial ``i`` of a run with master
seed ``s`` always uses ``derive_seed(s, i)``, so serial and parallel
execution produce identical statistics.  Aggregation goes through
``math.fsum`` (exact summation), which keeps results independent of chunking.

Estimators that condition on an event (an element landing in the selection
phase) do so by rejection: trials violating the condition are discarded,
which is unbiased.  Statistical acceptance in reports is one-sided at a few
standard errors, matching the direction of the analytical bounds.
"""

from __future__ import annotations

import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import permutations
from multiprocessing import Pool

from .model import LaminarInstance, chain
from .matroid import greedy_opt, brank
from .kicknext import (
    RunConfig,
    _ref_rank_lists,
    _run_weight,
    _sample_ids,
    make_trial,
    qualifies,
    reference_sets,
    run_kicknext,
)
from .theory import (
    _padded_brank,
    _node_optima,
    allkicked_bound,
    g_exact,
    g_refined_bound,
    g_weak_bound,
    ratio_lower_bound,
    theory_params,
    weighted_penalty,
    weighted_penalty_telescoped,
)

EXACT_ENUM_LIMIT = 8
_TOL = 1e-12
_MASK64 = (1 << 64) - 1


def derive_seed(master_seed: int, index: int) -> int:
    """Per-trial seed: SplitMix64 finalizer applied to
    ``master_seed + GOLDEN * (index + 1)``.  Stable across platforms."""
    z = (master_seed + 0x9E3779B97F4A7C15 * (index + 1)) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


# -- report types ------------------------------------------------------------


@dataclass(frozen=True)
class RatioEstimate:
    value: float
    std_err: float
    trials: int
    padding: bool
    bound: float | None  # analytical lower bound when p < 1/2


@dataclass(frozen=True)
class AllKickedRow:
    element: int
    node: int
    brank: int
    conditioned_trials: int
    frequency: float
    std_err: float
    bound: float


@dataclass(frozen=True)
class LemmaCheck:
    name: str
    passed: bool | None  # None = skipped or informational
    detail: str = ""


@dataclass(frozen=True)
class QualifyingProbability:
    probability: float
    bound: float
    exact: bool
    std_err: float | None = None
    conditioned_trials: int | None = None


@dataclass
class ExperimentReport:
    instance: str
    p: float
    trials: int
    master_seed: int
    ratio: RatioEstimate | None = None
    allkicked: list[AllKickedRow] = field(default_factory=list)
    lemma_checks: list[LemmaCheck] = field(default_factory=list)

    def rows(self):
        """(check_name, instance, p, value, bound_or_reference, std_err, pass)."""
        out = []
        if self.ratio is not None:
            r = self.ratio
            if r.bound is None:
                verdict = "1"
            else:
                verdict = "1" if r.value >= r.bound - 4.0 * r.std_err else "0"
            out.append(("ratio_estimate", self.instance, self.p, r.value,
                        r.bound, r.std_err, verdict))
        for row in self.allkicked:
            ok = row.frequency <= row.bound + 4.0 * row.std_err
            out.append((f"allkicked_e{row.element}_n{row.node}", self.instance,
                        self.p, row.frequency, row.bound, row.std_err,
                        "1" if ok else "0"))
        for chk in self.lemma_checks:
            verdict = "skip" if chk.passed is None else ("1" if chk.passed else "0")
            out.append((f"lemma_{chk.name}", self.instance, self.p,
                        None, None, None, verdict))
        return out

    def to_csv(self) -> str:
        def fmt(x):
            return "" if x is None else (repr(x) if isinstance(x, float) else str(x))

        lines = ["check_name,instance,p,value,bound_or_reference,std_err,pass"]
        for row in self.rows():
            lines.append(",".join(fmt(x) for x in row))
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        lines = [f"instance {self.instance}  p={self.p}  trials={self.trials}  seed={self.master_seed}"]
        if self.ratio is not None:
            r = self.ratio
            bound = "n/a" if r.bound is None else f"{r.bound:.6f}"
            lines.append(
                f"  ratio estimate {r.value:.6f} +- {r.std_err:.6f}  (guarantee {bound})"
            )
        if self.allkicked:
            worst = max(
                (row.frequency - row.bound for row in self.allkicked), default=0.0
            )
            lines.append(
                f"  eviction-failure frequencies: {len(self.allkicked)} (element, node) pairs, "
                f"worst margin over bound {worst:+.6f}"
            )
        for chk in self.lemma_checks:
            state = "skip" if chk.passed is None else ("pass" if chk.passed else "FAIL")
            detail = f" ({chk.detail})" if chk.detail else ""
            lines.append(f"  lemma {chk.name}: {state}{detail}")
        return "\n".join(lines) + "\n"

    def all_passed(self) -> bool:
        return all(row[-1] != "0" for row in self.rows())


# -- Monte Carlo ratio -------------------------------------------------------


def _trial_weights_chunk(inst, p, start, count, master_seed, padding):
    pre = inst.pre()
    rank_by_id = pre.rank_by_id
    n = pre.n_real
    cache: dict[int, list[list[int]]] | None = {} if n <= 16 else None
    out = []
    for idx in range(start, start + count):
        rnd = random.Random(derive_seed(master_seed, idx))
        sample, arrivals = _sample_ids(inst, p, rnd)
        in_s = [False] * n
        mask = 0
        for eid in sample:
            r = rank_by_id[eid]
            in_s[r] = True
            mask |= 1 << r
        order = [rank_by_id[eid] for eid in arrivals]
        if cache is None:
            out.append(_run_weight(pre, in_s, order, padding))
        else:
            refs = cache.get(mask)
            if refs is None:
                refs = _ref_rank_lists(pre, in_s, padding)
                cache[mask] = refs
            out.append(_run_weight(pre, in_s, order, padding, refs))
    return out


def monte_carlo_ratio(inst: LaminarInstance, p: float, trials: int, master_seed: int,
                      *, padding: bool = True, jobs: int = 1) -> ExperimentReport:
    """Estimate the expected solution-to-optimum weight ratio over ``trials``
    independent runs.  ``jobs`` only parallelizes; it never changes values."""
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    w_opt = greedy_opt(inst, None, inst.root_id).weight
    if not w_opt > 0.0:
        raise ValueError("degenerate instance: optimum weight is zero")

    if jobs <= 1:
        weights = _trial_weights_chunk(inst, p, 0, trials, master_seed, padding)
    else:
        step = (trials + jobs - 1) // jobs
        args = [
            (inst, p, start, min(step, trials - start), master_seed, padding)
            for start in range(0, trials, step)
        ]
        with Pool(processes=len(args)) as pool:
            chunks = pool.starmap(_trial_weights_chunk, args)
        weights = [w for ch in chunks for w in ch]

    ratios = [w / w_opt for w in weights]
    mean = math.fsum(ratios) / trials
    if trials > 1:
        var = (math.fsum(r * r for r in ratios) - trials * mean * mean) / (trials - 1)
        se = math.sqrt(max(var, 0.0) / trials)
    else:
        se = 0.0
    bound = ratio_lower_bound(p) if p < 0.5 else None
    report = ExperimentReport(inst.name, p, trials, master_seed)
    report.ratio = RatioEstimate(mean, se, trials, padding, bound)
    return report


# -- exact expectation by enumeration ----------------------------------------


def exact_expectation(inst: LaminarInstance, p: float, *, padding: bool = True):
    """Expected solution weight by exhausting every sample split and every
    arrival order.  Returns (expected_weight, total_probability); the latter
    is a self-check and equals 1 up to float rounding."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    pre = inst.pre()
    n = pre.n_real
    if n > EXACT_ENUM_LIMIT:
        raise ValueError(
            f"exact enumeration limited to {EXACT_ENUM_LIMIT} elements, got {n}"
        )
    contribs: list[float] = []
    probs: list[float] = []
    for mask in range(1 << n):  # set bit r: rank r arrives in the selection phase
        t_ranks = [r for r in range(n) if (mask >> r) & 1]
        t = len(t_ranks)
        prob = (1.0 - p) ** (n - t) * p ** t
        probs.append(prob)
        if t == 0:
            continue
        in_s = [not ((mask >> r) & 1) for r in range(n)]
        template = _ref_rank_lists(pre, in_s, padding)
        share = prob / math.factorial(t)
        acc = [
            _run_weight(pre, in_s, perm, padding, template)
            for perm in permutations(t_ranks)
        ]
        contribs.append(share * math.fsum(acc))
    return math.fsum(contribs), math.fsum(probs)


def exact_ratio(inst: LaminarInstance, p: float, *, padding: bool = True) -> float:
    """Exact expected ratio; see ``exact_expectation`` for the guard."""
    w_opt = greedy_opt(inst, None, inst.root_id).weight
    if not w_opt > 0.0:
        raise ValueError("degenerate instance: optimum weight is zero")
    expected, _ = exact_expectation(inst, p, padding=padding)
    return expected / w_opt


# -- eviction-failure frequencies ---------------------------------------------


def allkicked_frequency(inst: LaminarInstance, p: float, trials: int, master_seed: int,
                        *, padding: bool = True) -> list[AllKickedRow]:
    """For every optimum element and every node on its chain, estimate the
    conditional probability (given the element arrives in the selection
    phase) that all lighter reference elements at that node were already
    evicted when it arrived, next to the analytical bound."""
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    params = theory_params(p)  # the bound needs p < 1/2
    root = inst.root_id
    opt = greedy_opt(inst, None, root)
    chains = {eid: chain(inst, inst.membership[eid], root) for eid in opt.elements}
    hits: dict[tuple[int, int], int] = defaultdict(int)
    seen: dict[int, int] = defaultdict(int)

    for t_idx in range(trials):
        trial = make_trial(inst, p, derive_seed(master_seed, t_idx))
        res = run_kicknext(inst, trial, RunConfig(padding=padding, trace=True))
        arrived = {eid: s for s, eid in enumerate(trial.arrival_order)}
        ev_by_node: dict[int, list] = defaultdict(list)
        for ev in res.events:
            if ev.action == "accept":
                ev_by_node[ev.node].append((ev.step, inst.key(ev.evicted)))
        for eid in opt.elements:
            step_i = arrived.get(eid)
            if step_i is None:
                continue  # sampled, not conditioned on
            seen[eid] += 1
            key = inst.key(eid)
            for nid in chains[eid]:
                init_below = sum(1 for x in res.initial_refsets[nid] if inst.key(x) > key)
                gone = sum(1 for s, k in ev_by_node[nid] if s < step_i and k > key)
                if gone == init_below:
                    hits[(eid, nid)] += 1

    rows = []
    for eid in opt.elements:
        ncond = seen[eid]
        for nid in chains[eid]:
            d = brank(inst, eid, nid, None)
            freq = hits[(eid, nid)] / ncond if ncond else 0.0
            se = math.sqrt(freq * (1.0 - freq) / ncond) if ncond else 0.0
            rows.append(AllKickedRow(eid, nid, d, ncond, freq, se,
                                     allkicked_bound(params, d)))
    return rows


# -- qualifying-count joint probabilities --------------------------------------


def _qualifying_counts(inst, node_id, element_id, sample):
    """Counts per reference slot of selection-phase elements (other than the
    conditioning one) that qualify for the node and fall strictly between
    consecutive reference elements by weight."""
    refs = reference_sets(inst, sample, padding=True)
    slots = refs[node_id]  # ascending weight, padded to capacity
    got = [0] * len(slots)
    sample = set(sample)
    keys = [inst.key(x) for x in slots]
    for x in inst.members(node_id):
        if x == element_id or x in sample:
            continue
        if not qualifies(inst, x, node_id, refs):
            continue
        kx = inst.key(x)
        j = sum(1 for k in keys if k > kx)  # reference slots strictly lighter
        got[j - 1] += 1  # qualifying implies j >= 1
    return got


def qualifying_joint_probability(inst: LaminarInstance, p: float, node_id: int,
                                 counts, element_id: int, *, master_seed: int = 0,
                                 trials: int = 20000,
                                 method: str = "auto") -> QualifyingProbability:
    """Probability, conditional on ``element_id`` arriving in the selection
    phase, that the per-slot qualifying counts at ``node_id`` equal
    ``counts`` exactly — together with the product bound p^(sum of counts).

    Exact by enumeration when the instance is small enough, Monte Carlo
    otherwise (``method`` forces either).
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    counts = [int(x) for x in counts]
    if any(x < 0 for x in counts):
        raise ValueError("counts must be non-negative")
    cap = inst.node(node_id).capacity
    if len(counts) != cap:
        raise ValueError(
            f"counts must have one entry per reference slot ({cap} for node {node_id})"
        )
    inst.element(element_id)  # existence check
    bound = p ** sum(counts)
    n = inst.n
    if method not in ("auto", "exact", "mc"):
        raise ValueError(f"unknown method {method!r}")
    use_exact = method == "exact" or (method == "auto" and n <= EXACT_ENUM_LIMIT)

    if use_exact:
        if n > EXACT_ENUM_LIMIT:
            raise ValueError(
                f"exact enumeration limited to {EXACT_ENUM_LIMIT} elements, got {n}"
            )
        others = [e.id for e in inst.elements if e.id != element_id]
        acc = []
        for mask in range(1 << len(others)):
            sample = [others[i] for i in range(len(others)) if (mask >> i) & 1]
            prob = (1.0 - p) ** len(sample) * p ** (len(others) - len(sample))
            if _qualifying_counts(inst, node_id, element_id, sample) == counts:
                acc.append(prob)
        return QualifyingProbability(math.fsum(acc), bound, True)

    hits = 0
    ncond = 0
    for t_idx in range(trials):
        trial = make_trial(inst, p, derive_seed(master_seed, t_idx))
        if element_id in trial.sample_set:
            continue  # rejection sampling for the conditional law
        ncond += 1
        if _qualifying_counts(inst, node_id, element_id, trial.sample_set) == counts:
            hits += 1
    if ncond == 0:
        raise ValueError("no trial satisfied the conditioning event; raise trials")
    freq = hits / ncond
    se = math.sqrt(freq * (1.0 - freq) / ncond)
    return QualifyingProbability(freq, bound, False, se, ncond)


# -- lemma verification --------------------------------------------------------


def verify_lemmas(inst: LaminarInstance, p: float, *, trials: int = 200,
                  master_seed: int = 0) -> list[LemmaCheck]:
    """Exact per-instance checks of the chain-decay and weighted-penalty
    bounds plus sampled backward-rank dominance checks.  The decay bounds
    require c = 4p(1-p) < 1/2 and are reported as skipped otherwise."""
    params = theory_params(p)
    c = params.c
    checks: list[LemmaCheck] = []
    root = inst.root_id
    opt_root = greedy_opt(inst, None, root)

    if c < 0.5:
        ok = True
        witness = ""
        scanned = 0
        for nid in inst.pre().node_ids:
            opt_b = greedy_opt(inst, None, nid)
            k = inst.node(nid).capacity
            for m in range(len(opt_b) + 1):
                scanned += 1
                g = g_exact(inst, m, nid, c)
                refined = g_refined_bound(m, k, c)
                weak = g_weak_bound(m, c)
                if g > refined + _TOL or refined > weak + _TOL:
                    ok = False
                    witness = (f"node {nid}, m={m}: g={g!r}, refined={refined!r}, "
                               f"weak={weak!r}")
                    break
            if not ok:
                break
        checks.append(LemmaCheck(
            "g-chain-decay", ok,
            witness or f"{scanned} (node, m) pairs: exact <= refined <= weak"))

        pen = weighted_penalty(inst, c)
        cap_bound = g_weak_bound(1, c) * opt_root.weight
        checks.append(LemmaCheck(
            "weighted-penalty", pen <= cap_bound + _TOL,
            f"penalty={pen!r} vs 2c/(1-c)*w(OPT)={cap_bound!r}"))

        tele = weighted_penalty_telescoped(inst, c)
        scale = max(1.0, abs(pen))
        checks.append(LemmaCheck(
            "telescoping-identity", abs(pen - tele) <= 1e-9 * scale,
            f"direct={pen!r} telescoped={tele!r}"))
    else:
        reason = f"skipped: hypothesis not met (c={c:.4f} >= 1/2)"
        checks.append(LemmaCheck("g-chain-decay", None, reason))
        checks.append(LemmaCheck("weighted-penalty", None, reason))
        checks.append(LemmaCheck("telescoping-identity", None, reason))

    # backward-rank dominance of sample optima, in the padded view
    opts = _node_optima(inst)
    node_ids = inst.pre().node_ids
    weak_ok = True
    weak_witness = ""
    member_ok = True
    member_witness = ""
    strict_violations = 0
    strict_example = ""
    for t_idx in range(trials):
        trial = make_trial(inst, p, derive_seed(master_seed, t_idx))
        refs = reference_sets(inst, trial.sample_set, padding=True)
        for nid in node_ids:
            ref_keys = [inst.key(x) for x in refs[nid]]
            for eid in inst.members(nid):
                key = inst.key(eid)
                bs = sum(1 for k in ref_keys if k > key)
                bu = _padded_brank(inst, opts, eid, nid)
                if bs < bu and weak_ok:
                    weak_ok = False
                    weak_witness = f"trial {t_idx}, element {eid}, node {nid}: {bs} < {bu}"
                if eid in trial.sample_set:
                    continue
                if eid in opts[nid].ids:
                    if bs < bu + 1 and member_ok:
                        member_ok = False
                        member_witness = (f"trial {t_idx}, element {eid}, node {nid}: "
                                          f"{bs} < {bu}+1")
                elif bs < bu + 1:
                    strict_violations += 1
                    if not strict_example:
                        strict_example = f"trial {t_idx}, element {eid}, node {nid}"
    checks.append(LemmaCheck("brank-dominance", weak_ok,
                             weak_witness or f"{trials} trials, all nodes"))
    checks.append(LemmaCheck("brank-dominance-optimum", member_ok,
                             member_witness or "strict +1 for optimum elements held"))
    checks.append(LemmaCheck(
        "brank-dominance-strict", None,
        f"informational: +1 for arbitrary arriving elements violated "
        f"{strict_violations} times" + (f" (first: {strict_example})" if strict_example else "")))
    return checks
