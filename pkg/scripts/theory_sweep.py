#!/usr/bin/env python3
"""Sweep the competitive-ratio guarantee over the sampling parameter.

Usage: python scripts/theory_sweep.py [--step H] [--csv FILE]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from laminar_secretary import best_p, ratio_lower_bound, theory_params


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--step", type=float, default=0.005)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()

    lines = ["p,alpha,c,ratio_lower_bound"]
    k = 1
    while k * args.step < 0.5:
        p = k * args.step
        t = theory_params(p)
        lines.append(f"{p!r},{t.alpha!r},{t.c!r},{ratio_lower_bound(p)!r}")
        k += 1
    text = "\n".join(lines) + "\n"
    if args.csv:
        Path(args.csv).write_text(text)
        print(f"wrote {len(lines) - 1} rows to {args.csv}")
    else:
        sys.stdout.write(text)

    p_star, ratio_star = best_p(args.step)
    print(f"# maximizer: p = {p_star:.4f} with guaranteed ratio {ratio_star:.6f}")
    p_fine, ratio_fine = best_p(0.0001)
    print(f"# fine grid:  p = {p_fine:.4f} with guaranteed ratio {ratio_fine:.6f}")


if __name__ == "__main__":
    main()
