"""Command-line interface.

Subcommands: ``gen`` (instance generation), ``opt`` (offline optimum),
``run`` (single seeded online run), ``montecarlo`` (ratio estimation),
``exact`` (enumeration oracle), ``theory`` (analysis constants), ``verify``
(bound and lemma checks).  Every run is fully determined by its flags; CSV
output is byte-identical across invocations.

Exit codes: 0 success, 1 verification failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import (
    allkicked_frequency,
    exact_expectation,
    exact_ratio,
    monte_carlo_ratio,
    verify_lemmas,
)
from .generators import FAMILIES, WEIGHTS, GenSpec, generate
from .kicknext import RunConfig, make_trial, run_kicknext, trace_csv
from .matroid import greedy_opt
from .model import InstanceError, dump_instance, load_instance
from .theory import ratio_lower_bound, theory_params


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="laminar-secretary", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a seeded instance")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--weights", default="uniform", choices=WEIGHTS)
    g.add_argument("--k", type=int, default=None, help="capacity for the uniform family")
    g.add_argument("--parts", type=int, default=None)
    g.add_argument("--part-capacity", type=int, default=1)
    g.add_argument("--depth", type=int, default=None)
    g.add_argument("--max-branching", type=int, default=3)
    g.add_argument("--power-exponent", type=float, default=2.0)
    g.add_argument("-o", "--output", default=None)

    o = sub.add_parser("opt", help="offline maximum-weight feasible set")
    o.add_argument("file")
    o.add_argument("--node", type=int, default=None)

    r = sub.add_parser("run", help="one seeded online run")
    r.add_argument("file")
    r.add_argument("--p", type=float, default=0.08)
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--trace", action="store_true")
    r.add_argument("--no-padding", action="store_true")
    r.add_argument("-o", "--output", default=None)

    m = sub.add_parser("montecarlo", help="Monte Carlo ratio estimate")
    m.add_argument("file")
    m.add_argument("--p", type=float, default=0.08)
    m.add_argument("--trials", type=int, default=100000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--jobs", type=int, default=1)
    m.add_argument("--no-padding", action="store_true")
    m.add_argument("--csv", default=None)

    e = sub.add_parser("exact", help="exact expected ratio by enumeration")
    e.add_argument("file")
    e.add_argument("--p", type=float, default=0.08)
    e.add_argument("--no-padding", action="store_true")

    t = sub.add_parser("theory", help="analysis constants and the ratio guarantee")
    t.add_argument("--p", type=float, default=None)
    t.add_argument("--p-min", type=float, default=None)
    t.add_argument("--p-max", type=float, default=None)
    t.add_argument("--step", type=float, default=0.01)
    t.add_argument("--csv", default=None)

    v = sub.add_parser("verify", help="run lemma and bound checks on an instance")
    v.add_argument("file")
    v.add_argument("--p", type=float, default=0.08)
    v.add_argument("--trials", type=int, default=2000)
    v.add_argument("--seed", type=int, default=0)
    return top


def _load(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InstanceError(f"cannot read instance file {path}: {exc}") from None
    return load_instance(text)


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _cmd_gen(args) -> int:
    spec = GenSpec(
        family=args.family, n=args.n, seed=args.seed, weights=args.weights,
        rank=args.k, parts=args.parts, part_capacity=args.part_capacity,
        depth=args.depth, max_branching=args.max_branching,
        power_exponent=args.power_exponent,
    )
    _emit(dump_instance(generate(spec)) + "\n", args.output)
    return 0


def _cmd_opt(args) -> int:
    inst = _load(args.file)
    node = args.node if args.node is not None else inst.root_id
    opt = greedy_opt(inst, None, node)
    print(f"instance {inst.name}: node {node} optimum has "
          f"{len(opt)} elements, weight {opt.weight!r}")
    for eid in reversed(opt.elements):  # heaviest first
        print(f"element {eid} weight {inst.weight(eid)!r}")
    return 0


def _cmd_run(args) -> int:
    inst = _load(args.file)
    trial = make_trial(inst, args.p, args.seed)
    config = RunConfig(padding=not args.no_padding, trace=args.trace)
    result = run_kicknext(inst, trial, config)
    if args.trace:
        _emit(trace_csv(result), args.output)
        if args.output is None:
            return 0
    total = sum(inst.weight(eid) for eid in result.sol_root)
    print(f"sample {len(trial.sample_set)} elements, arrivals {len(trial.arrival_order)}")
    print(f"selected {len(result.sol_root)} elements, weight {total!r}")
    for eid in result.sol_root:
        print(f"element {eid} weight {inst.weight(eid)!r}")
    return 0


def _cmd_montecarlo(args) -> int:
    inst = _load(args.file)
    report = monte_carlo_ratio(
        inst, args.p, args.trials, args.seed,
        padding=not args.no_padding, jobs=args.jobs,
    )
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    sys.stdout.write(report.summary())
    return 0


def _cmd_exact(args) -> int:
    inst = _load(args.file)
    padding = not args.no_padding
    expected, prob_total = exact_expectation(inst, args.p, padding=padding)
    ratio = exact_ratio(inst, args.p, padding=padding)
    print(f"exact expected weight {expected!r} (probability mass {prob_total!r})")
    print(f"exact ratio {ratio!r}")
    return 0


def _cmd_theory(args) -> int:
    if args.p is not None:
        grid = [args.p]
    elif args.p_min is not None:
        hi = args.p_max if args.p_max is not None else args.p_min
        grid = []
        k = 0
        while args.p_min + k * args.step <= hi + 1e-12:
            grid.append(args.p_min + k * args.step)
            k += 1
    else:
        grid = [0.08]
    lines = ["p,alpha,c,ratio_lower_bound"]
    for p in grid:
        t = theory_params(p)
        lines.append(f"{p!r},{t.alpha!r},{t.c!r},{ratio_lower_bound(p)!r}")
    text = "\n".join(lines) + "\n"
    if args.csv:
        Path(args.csv).write_text(text)
    sys.stdout.write(text)
    return 0


def _cmd_verify(args) -> int:
    inst = _load(args.file)
    report = monte_carlo_ratio(inst, args.p, args.trials, args.seed)
    report.lemma_checks = verify_lemmas(inst, args.p, trials=min(args.trials, 500),
                                        master_seed=args.seed)
    if 0.0 < args.p < 0.5:
        report.allkicked = allkicked_frequency(inst, args.p, args.trials, args.seed)
    sys.stdout.write(report.summary())
    if inst.n <= 8:
        unpadded = exact_ratio(inst, args.p, padding=False)
        padded = exact_ratio(inst, args.p, padding=True)
        print(f"exact ratio: padded {padded!r}, unpadded {unpadded!r} (informational)")
    ok = report.all_passed()
    print("verify: PASS" if ok else "verify: FAIL")
    return 0 if ok else 1


_COMMANDS = {
    "gen": _cmd_gen,
    "opt": _cmd_opt,
    "run": _cmd_run,
    "montecarlo": _cmd_montecarlo,
    "exact": _cmd_exact,
    "theory": _cmd_theory,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (InstanceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
