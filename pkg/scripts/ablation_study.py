#!/usr/bin/env python3
"""Run the full module-combination study over the I, L and T scenes.

Writes per-scenario maps and reports under the output directory and prints a
combined score matrix (rows: combinations, columns: scenarios, lower is
better).
"""

import argparse
import pathlib

from travmap.pipeline import COMBINATIONS, RunConfig, combo_label, run_ablation


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--queries", type=int, default=20)
    ap.add_argument("--out", default="out/ablation")
    ap.add_argument("--scenarios", default="I,L,T")
    args = ap.parse_args()

    scenarios = [s.strip() for s in args.scenarios.split(",") if s.strip()]
    labels = [combo_label(c) for c in COMBINATIONS]
    scores: dict[str, dict[str, float]] = {label: {} for label in labels}
    for scenario in scenarios:
        out_dir = pathlib.Path(args.out) / scenario
        cfg = RunConfig(
            scenario=scenario,
            combos=tuple(labels),
            seed=args.seed,
            out_dir=str(out_dir),
            n_queries=args.queries,
        )
        output = run_ablation(cfg)
        for row in output.report.rows:
            scores[row.combination][scenario] = row.score
        print(f"{scenario}: wrote {out_dir}")

    width = max(len(label) for label in labels)
    header = " " * width + "".join(f"{s:>10}" for s in scenarios)
    print()
    print(header)
    for label in labels:
        cells = "".join(f"{scores[label].get(s, float('nan')):>10.3f}" for s in scenarios)
        print(f"{label:<{width}}{cells}")
    print("\nlower is better")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
