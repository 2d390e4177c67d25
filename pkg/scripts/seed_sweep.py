#!/usr/bin/env python3
"""Compare module combinations over many seeds on one scenario.

Useful for checking that score differences are systematic rather than
query-sampling luck: the same simulation and query set is shared by every
combination within a seed.
"""

import argparse

import numpy as np

from travmap.pipeline import RunConfig, combo_layers, combo_label, run_ablation


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default="T")
    ap.add_argument("--combos", default="SfM+PfH+HO3,SfM")
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--queries", type=int, default=20)
    args = ap.parse_args()

    combos = tuple(combo_label(combo_layers(c)) for c in args.combos.split(","))
    scores = {c: [] for c in combos}
    for seed in range(args.seeds):
        out = run_ablation(
            RunConfig(scenario=args.scenario, combos=combos, seed=seed, n_queries=args.queries)
        )
        row = {r.combination: r.score for r in out.report.rows}
        for c in combos:
            scores[c].append(row[c])
        print(f"seed {seed}: " + "  ".join(f"{c}={row[c]:.3f}" for c in combos))

    print()
    for c in combos:
        arr = np.array(scores[c])
        print(f"{c}: mean {arr.mean():.4f}  min {arr.min():.3f}  max {arr.max():.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
