"""Command-line entry points.

Subcommands:

* ``simulate`` -- dump the simulated frame stream as JSON lines.
* ``build``    -- run the pipeline and write maps plus the evidence log.
* ``evaluate`` -- score existing PGM maps against a ground-truth PGM.
* ``ablate``   -- full run: every requested combination, maps, report.csv.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import pathlib
import sys
from typing import Optional, Sequence

from .evidence import export_evidence_log
from .gridmap import LayerPriority, export_pgm, import_pgm
from .pipeline import (
    COMBINATIONS,
    PipelineParams,
    RunConfig,
    build_combo_map,
    combo_label,
    combo_layers,
    run_ablation,
    run_pipeline,
)
from .quality import QualityReport, ReportRow, evaluate_map, sample_queries
from .scenario import load_scenario
from .scenesim import ground_truth_map, simulate_sequence

__all__ = ["main"]


def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", default="I", help="builtin kind (I, L, T) or scenario file path")
    p.add_argument("--seed", type=int, default=0, help="simulation / query seed")
    p.add_argument("--out", default="out", help="output directory")


def _add_pipeline_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--omega-max", type=float, default=0.3, help="turning-frame cutoff (rad/s)")
    p.add_argument("--gate", type=float, default=80.0, help="association gate (px)")
    p.add_argument("--priority", default="sfm,ho3,pfh", help="layer priority, lowest first")
    p.add_argument("--trail-half-width", type=float, default=0.2)
    p.add_argument("--passage-half-width", type=float, default=0.3)


def _params_from_args(args) -> PipelineParams:
    params = PipelineParams()
    params.omega_max = args.omega_max
    params.gate_px = args.gate
    params.priority = LayerPriority(tuple(s.strip().lower() for s in args.priority.split(",")))
    params.rebuild = dataclasses.replace(
        params.rebuild,
        trail_half_width=args.trail_half_width,
        passage_half_width=args.passage_half_width,
    )
    return params


def _cmd_simulate(args) -> int:
    scene = load_scenario(args.scenario)
    scene = dataclasses.replace(scene, rng_seed=args.seed)
    frames, _truth = simulate_sequence(scene)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{scene.name}_frames.jsonl"
    with open(path, "w", encoding="ascii") as fh:
        for frame in frames:
            fh.write(json.dumps(dataclasses.asdict(frame), sort_keys=True, default=float))
            fh.write("\n")
    print(f"wrote {len(frames)} frames to {path}")
    return 0


def _cmd_build(args) -> int:
    scene = load_scenario(args.scenario)
    scene = dataclasses.replace(scene, rng_seed=args.seed)
    params = _params_from_args(args)
    result = run_pipeline(scene, params)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "ground_truth.pgm").write_bytes(export_pgm(ground_truth_map(scene)))
    rebuild = dataclasses.replace(params.rebuild, robot_radius=scene.robot_radius)
    for label in args.combos.split(","):
        layers = combo_layers(label)
        m = build_combo_map(result, layers, priority=params.priority, params=rebuild)
        (out / f"{scene.name}_{combo_label(layers)}.pgm").write_bytes(export_pgm(m))
    (out / "evidence.log").write_text(export_evidence_log(result.store), encoding="ascii")
    print(f"wrote maps and evidence log to {out}")
    return 0


def _cmd_evaluate(args) -> int:
    gt = import_pgm(pathlib.Path(args.ground_truth).read_bytes(), (args.origin_x, args.origin_y), args.resolution)
    queries = sample_queries(gt, args.queries, args.seed, args.min_separation)
    rows = []
    for candidate in args.maps:
        path = pathlib.Path(candidate)
        m = import_pgm(path.read_bytes(), (args.origin_x, args.origin_y), args.resolution)
        ev = evaluate_map(m, gt, queries)
        rows.append(ReportRow(path.stem, args.label, ev.score, ev.n_queries, ev.n_failed))
        print(f"{path.stem}: score {ev.score:.4f} m ({ev.n_failed}/{ev.n_queries} failed)")
    report = QualityReport(rows)
    if args.out:
        out = pathlib.Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.csv").write_text(report.to_csv(), encoding="ascii")
        print(f"wrote {out / 'report.csv'}")
    return 0


def _cmd_ablate(args) -> int:
    params = _params_from_args(args)
    combos = tuple(combo_label(combo_layers(label)) for label in args.combos.split(","))
    run_cfg = RunConfig(
        scenario=args.scenario,
        combos=combos,
        seed=args.seed,
        out_dir=args.out,
        n_queries=args.queries,
        min_separation=args.min_separation,
        params=params,
    )
    output = run_ablation(run_cfg)
    sys.stdout.write(output.report.to_csv())
    print(f"maps and report written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="travmap", description="traversability mapping from simulated human observation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="dump the simulated frame stream")
    _add_scenario_args(p)
    p.set_defaults(func=_cmd_simulate)

    all_combos = ",".join(combo_label(c) for c in COMBINATIONS)

    p = sub.add_parser("build", help="build per-combination maps without scoring")
    _add_scenario_args(p)
    _add_pipeline_args(p)
    p.add_argument("--combos", default=all_combos, help="comma list, e.g. SfM+PfH,HO3")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("evaluate", help="score existing PGM maps against a ground-truth PGM")
    p.add_argument("--ground-truth", required=True, help="ground-truth PGM path")
    p.add_argument("--maps", nargs="+", required=True, help="candidate PGM paths")
    p.add_argument("--resolution", type=float, default=0.10)
    p.add_argument("--origin-x", type=float, default=0.0)
    p.add_argument("--origin-y", type=float, default=0.0)
    p.add_argument("--queries", type=int, default=20)
    p.add_argument("--min-separation", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--label", default="external", help="scenario label for the report")
    p.add_argument("--out", default=None, help="directory for report.csv (optional)")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("ablate", help="full ablation: maps plus report.csv")
    _add_scenario_args(p)
    _add_pipeline_args(p)
    p.add_argument("--combos", default=all_combos, help="comma list, e.g. SfM+PfH,HO3")
    p.add_argument("--queries", type=int, default=20)
    p.add_argument("--min-separation", type=float, default=2.0)
    p.set_defaults(func=_cmd_ablate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
