"""End-to-end mapping pipeline and the ablation harness.

One pass over a simulated sequence feeds four consumers: the pose graph
(keyframes every ``keyframe_stride`` frames plus configured loop closures),
the human tracker, the landmark table, and the evidence store.  Maps for any
module combination are then regenerated from the evidence at the current pose
snapshot and scored against the ground-truth map with a shared query set, so
combination scores differ only because of the modules, not sampling.

Loop-closure *detection* is out of scope: closures come from the simulator's
ground truth (a keyframe revisiting a previously mapped spot) or from an
explicit list, and each closure triggers an immediate optimization event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import mot
from .evidence import (
    ClassifiedFeature,
    EvidenceStore,
    Landmark,
    OcclusionClass,
    RebuildParams,
    ScaleCalibration,
    apparent_height_px,
    calibrate_scale,
    classify_occlusion,
    estimate_depth,
    human_map_position,
    infer_pass_pair,
    rebuild_map,
)
from .gridmap import DEFAULT_PRIORITY, LayerPriority, TraversabilityMap, export_pgm, new_map
from .posegraph import OptimizationEvent, Pose2, PoseGraph, se2_compose, se2_inverse, se2_transform
from .quality import EvaluationResult, JourneyQuery, QualityReport, ReportRow, evaluate_map, sample_queries
from .scenesim import FrameObservation, GroundTruth, SceneConfig, ground_truth_map, simulate_sequence

__all__ = [
    "PipelineParams",
    "PipelineResult",
    "RunConfig",
    "COMBINATIONS",
    "combo_label",
    "combo_layers",
    "run_pipeline",
    "build_combo_map",
    "run_ablation",
]

#: Canonical module combinations in report order.
COMBINATIONS = (
    ("sfm", "pfh", "ho3"),
    ("sfm", "pfh"),
    ("sfm", "ho3"),
    ("pfh", "ho3"),
    ("sfm",),
    ("pfh",),
    ("ho3",),
)

_LABELS = {"sfm": "SfM", "pfh": "PfH", "ho3": "HO3"}
_LAYERS_BY_LABEL = {label.lower(): layer for layer, label in _LABELS.items()}

#: Candidate features must sit this far (px) inside the box: the boundary
#: column is where a sight line merely grazes the body, which orders nothing.
_REGION_MARGIN_PX = 1.0


def combo_label(layers: Sequence[str]) -> str:
    ordered = [layer for layer in ("sfm", "pfh", "ho3") if layer in layers]
    return "+".join(_LABELS[layer] for layer in ordered)


def combo_layers(label: str) -> tuple[str, ...]:
    layers = []
    for part in label.split("+"):
        layer = _LAYERS_BY_LABEL.get(part.strip().lower())
        if layer is None:
            raise ValueError(f"unknown module {part!r} in combination {label!r}")
        layers.append(layer)
    if not layers or len(set(layers)) != len(layers):
        raise ValueError(f"bad combination {label!r}")
    return tuple(layer for layer in ("sfm", "pfh", "ho3") if layer in layers)


@dataclass
class PipelineParams:
    keyframe_stride: int = 10
    omega_max: float = 0.3
    gate_px: float = 80.0
    max_missed: int = 15
    assumed_body_height: float = 1.70
    calibration_samples: int = 25
    enable_closures: bool = True
    closure_radius: float = 0.5
    closure_min_gap: int = 20  # keyframes
    closures: Optional[list[tuple[int, int]]] = None  # explicit (older_kf, newer_kf)
    rebuild: RebuildParams = field(default_factory=RebuildParams)
    priority: LayerPriority = field(default_factory=lambda: DEFAULT_PRIORITY)


@dataclass
class PositionDiag:
    """Per-detection position estimate next to its ground truth."""

    frame_index: int
    track_id: int
    agent_index: int
    estimated: tuple[float, float]
    true_world: tuple[float, float]
    estimated_depth: float
    true_depth: float


@dataclass
class OcclusionDiag:
    """One classified pass-between candidate (for the depth-oracle cross-check)."""

    frame_index: int
    track_id: int
    agent_index: int
    feature_id: int
    label: OcclusionClass
    u: float
    predicted_depth: float
    human_depth_estimate: float


@dataclass
class PairDiag:
    """Emitted pass-between pair with the depths that justified it."""

    frame_index: int
    track_id: int
    front_id: int
    behind_id: int
    front_depth: float
    behind_depth: float
    human_depth: float


@dataclass
class PipelineResult:
    config: SceneConfig
    frames: list[FrameObservation]
    truth: GroundTruth
    keep_mask: list[bool]
    graph: PoseGraph
    landmarks: dict[int, Landmark]
    store: EvidenceStore
    tracks: list[mot.HumanTrack]
    calibration: ScaleCalibration
    events: list[OptimizationEvent]
    keyframe_frames: dict[int, int]  # keyframe id -> frame index
    position_diags: list[PositionDiag]
    occlusion_diags: list[OcclusionDiag]
    pair_diags: list[PairDiag]


def _calibrate_from_frames(frames: Sequence[FrameObservation], cfg: SceneConfig, params: PipelineParams) -> ScaleCalibration:
    """Offline scale calibration against ranged detections, as a pre-step.

    The simulator's true range plays the role of the externally measured
    distance the scale is calibrated against.
    """
    samples = []
    for frame in frames:
        for det in frame.detections:
            h_px = apparent_height_px(det.y_min, cfg.intrinsics, params.assumed_body_height)
            if h_px is None:
                continue
            samples.append((det.depth, cfg.intrinsics.f, h_px, params.assumed_body_height))
            if len(samples) >= params.calibration_samples:
                return calibrate_scale(samples)
    if not samples:
        return ScaleCalibration(1.0)
    return calibrate_scale(samples)


def run_pipeline(cfg: SceneConfig, params: Optional[PipelineParams] = None) -> PipelineResult:
    """Simulate a scene and ingest it end to end; returns everything rebuildable."""
    params = params or PipelineParams()
    intr = cfg.intrinsics
    frames, truth = simulate_sequence(cfg)
    keep = mot.filter_turning_frames(frames, params.omega_max)
    cal = _calibrate_from_frames(frames, cfg, params)

    graph = PoseGraph(Pose2(*frames[0].camera_pose))
    events: list[OptimizationEvent] = []
    keyframe_frames = {0: 0}
    kf_true_pose = {0: truth.camera_poses[0]}
    landmarks: dict[int, Landmark] = {}
    store = EvidenceStore()
    tracks: list[mot.HumanTrack] = []

    position_diags: list[PositionDiag] = []
    occlusion_diags: list[OcclusionDiag] = []
    pair_diags: list[PairDiag] = []

    explicit_closures: dict[int, list[int]] = {}
    if params.closures:
        for older, newer in params.closures:
            explicit_closures.setdefault(newer, []).append(older)

    # Landmark worlds cache, refreshed on new landmarks or optimization events.
    lm_ids: list[int] = []
    lm_worlds = np.zeros((0, 2))
    worlds_dirty = False

    def refresh_worlds():
        nonlocal lm_worlds, worlds_dirty
        snapshot = graph.nodes
        lm_worlds = np.array([landmarks[fid].world(snapshot) for fid in lm_ids]) if lm_ids else np.zeros((0, 2))
        worlds_dirty = False

    last_closure_kf = -10**9

    def maybe_close_loop(kf: int) -> None:
        nonlocal worlds_dirty, last_closure_kf
        partners: list[int] = list(explicit_closures.get(kf, ()))
        if params.enable_closures and not partners and kf - last_closure_kf >= params.closure_min_gap:
            px, py, _ = kf_true_pose[kf]
            for older in sorted(kf_true_pose):
                if kf - older < params.closure_min_gap:
                    break
                ox, oy, _ = kf_true_pose[older]
                if math.hypot(px - ox, py - oy) <= params.closure_radius:
                    partners.append(older)
                    break
        for older in partners:
            rel = se2_compose(se2_inverse(Pose2(*kf_true_pose[older])), Pose2(*kf_true_pose[kf]))
            graph.add_loop_closure(older, kf, rel)
            events.append(graph.optimize())
            last_closure_kf = kf
            worlds_dirty = True

    odom_acc = Pose2()
    current_kf = 0
    prev_kept: dict[int, tuple[float, float]] = {}
    prev_kept_frame = -10

    for frame in frames:
        fi = frame.frame_index
        if fi > 0:
            odom_acc = se2_compose(odom_acc, Pose2(*frame.odometry))
            if fi % params.keyframe_stride == 0:
                current_kf = graph.add_keyframe(odom_acc)
                odom_acc = Pose2()
                keyframe_frames[current_kf] = fi
                kf_true_pose[current_kf] = truth.camera_poses[fi]
                maybe_close_loop(current_kf)
        pose_est = se2_compose(graph.pose(current_kf), odom_acc)
        at_keyframe = keyframe_frames.get(current_kf) == fi

        # -- track humans (every frame, estimates attached when available)
        dets = []
        for det in frame.detections:
            depth_est = None
            world_est = None
            h_px = apparent_height_px(det.y_min, intr, params.assumed_body_height)
            if h_px is not None:
                depth_est = estimate_depth(cal, intr.f, params.assumed_body_height, h_px)
                world_est = human_map_position(pose_est.as_tuple(), intr, (det.x_min, det.x_max, det.y_min, det.y_max), depth_est)
            dets.append(mot.TrackedDetection((det.x_min, det.x_max, det.y_min, det.y_max), depth_est, world_est))
        mot.step(tracks, dets, fi, params.gate_px)
        mot.prune(tracks, params.max_missed)

        det_of_bbox = {d.bbox: det for d, det in zip(dets, frame.detections)}
        matched = [t for t in tracks if t.state is mot.TrackState.CONFIRMED and t.matched_at(fi)]
        for track in matched:
            tp = track.last
            if tp.world is None:
                continue
            src = det_of_bbox.get(tp.bbox)
            if src is not None:
                position_diags.append(
                    PositionDiag(fi, track.track_id, src.agent_index, tp.world, src.world, tp.depth, src.depth)
                )

        # -- landmarks and feature evidence at keyframes (not gated by turning:
        #    the turning filter only withholds human-derived evidence)
        if at_keyframe:
            for fobs in frame.features:
                if not fobs.visible:
                    continue
                if fobs.feature_id not in landmarks:
                    lateral = (fobs.u - intr.cx) * fobs.depth / intr.f
                    offset = (fobs.depth, -lateral)
                    landmarks[fobs.feature_id] = Landmark(fobs.feature_id, current_kf, offset)
                    lm_ids.append(fobs.feature_id)
                    worlds_dirty = True
                store.add_sfm(fobs.feature_id)

        if not keep[fi]:
            # Turning frame: feeds the pose graph and the feature map, but
            # contributes no trail or pass-between evidence.
            continue

        # -- trail evidence every kept frame, anchored to the newest keyframe
        for track in matched:
            tp = track.last
            if tp.world is None:
                continue
            offset = se2_transform(se2_inverse(graph.pose(current_kf)), tp.world)
            store.add_pfh(current_kf, offset, track.track_id)

        # -- pass-between inference (every kept frame with fresh visibility memory)
        if worlds_dirty:
            refresh_worlds()
        visible_now = {f.feature_id: f for f in frame.features if f.visible}
        if lm_ids and prev_kept_frame == fi - 1 and matched:
            cam = pose_est.as_tuple()
            c, s = math.cos(cam[2]), math.sin(cam[2])
            dx = lm_worlds[:, 0] - cam[0]
            dy = lm_worlds[:, 1] - cam[1]
            depth_pred = c * dx + s * dy
            with np.errstate(divide="ignore", invalid="ignore"):
                u_pred = intr.cx + intr.f * (s * dx - c * dy) / depth_pred
            lm_index = {fid: k for k, fid in enumerate(lm_ids)}
            for track in matched:
                tp = track.last
                if tp.depth is None:
                    continue
                bbox = tp.bbox
                src = det_of_bbox.get(tp.bbox)
                agent_index = src.agent_index if src is not None else -1
                inner = (bbox[0] + _REGION_MARGIN_PX, bbox[1] - _REGION_MARGIN_PX, bbox[2], bbox[3])
                if inner[0] >= inner[1]:
                    continue
                classified: list[ClassifiedFeature] = []
                for fid, fobs in visible_now.items():
                    # No row gate here: a feature occluding the human sits at the
                    # visible-region boundary, so only the column test is binding.
                    k = lm_index.get(fid)
                    if k is None:
                        continue
                    label = classify_occlusion(fobs.u, True, inner)
                    if label is OcclusionClass.UNRELATED:
                        continue
                    classified.append(ClassifiedFeature(fid, label, fobs.u, float(depth_pred[k])))
                    occlusion_diags.append(
                        OcclusionDiag(fi, track.track_id, agent_index, fid, label, fobs.u, float(depth_pred[k]), tp.depth)
                    )
                for fid, (pu, pv) in prev_kept.items():
                    k = lm_index.get(fid)
                    if k is None or fid in visible_now:
                        continue
                    if depth_pred[k] <= 0 or not (bbox[2] <= pv <= bbox[3]):
                        continue
                    label = classify_occlusion(float(u_pred[k]), False, inner)
                    if label is OcclusionClass.UNRELATED:
                        continue
                    classified.append(ClassifiedFeature(fid, label, float(u_pred[k]), float(depth_pred[k])))
                    occlusion_diags.append(
                        OcclusionDiag(fi, track.track_id, agent_index, fid, label, float(u_pred[k]), float(depth_pred[k]), tp.depth)
                    )
                pair = infer_pass_pair(classified, tp.depth, 0.5 * (bbox[0] + bbox[1]))
                if pair is not None:
                    front_id, behind_id = pair
                    by_id = {c.feature_id: c for c in classified}
                    front_d = by_id[front_id].depth
                    behind_d = by_id[behind_id].depth
                    assert front_d < tp.depth < behind_d, "pass-between pair must straddle the human"
                    store.add_ho3(front_id, behind_id, track.track_id)
                    pair_diags.append(PairDiag(fi, track.track_id, front_id, behind_id, front_d, behind_d, tp.depth))
        prev_kept = {fid: (f.u, f.v) for fid, f in visible_now.items()}
        prev_kept_frame = fi

    return PipelineResult(
        cfg,
        frames,
        truth,
        keep,
        graph,
        landmarks,
        store,
        tracks,
        cal,
        events,
        keyframe_frames,
        position_diags,
        occlusion_diags,
        pair_diags,
    )


def build_combo_map(
    result: PipelineResult,
    layers: Sequence[str],
    base: Optional[TraversabilityMap] = None,
    priority: Optional[LayerPriority] = None,
    params: Optional[RebuildParams] = None,
) -> TraversabilityMap:
    """Regenerate the map for one module combination at the current poses."""
    if base is None:
        x_min, y_min, x_max, y_max = result.config.bounds
        base = new_map(x_min, y_min, x_max, y_max)
    return rebuild_map(
        result.store,
        result.graph.snapshot(),
        result.landmarks,
        base,
        layers,
        priority or DEFAULT_PRIORITY,
        params or RebuildParams(robot_radius=result.config.robot_radius),
    )


@dataclass
class RunConfig:
    scenario: str = "I"
    combos: tuple[str, ...] = tuple(combo_label(c) for c in COMBINATIONS)
    seed: int = 0
    out_dir: Optional[str] = None
    n_queries: int = 20
    min_separation: float = 2.0
    failure_penalty: Optional[float] = None
    params: PipelineParams = field(default_factory=PipelineParams)

    def __post_init__(self):
        if not self.combos:
            raise ValueError("need at least one module combination")


@dataclass
class AblationOutput:
    report: QualityReport
    ground_truth: TraversabilityMap
    maps: dict[str, TraversabilityMap]
    queries: list[JourneyQuery]
    evaluations: dict[str, EvaluationResult]
    result: PipelineResult


def run_ablation(run_cfg: RunConfig, scene: Optional[SceneConfig] = None) -> AblationOutput:
    """Full ablation pass: one simulation, one query set, one map per combination.

    When ``out_dir`` is set, writes ``ground_truth.pgm``, one
    ``<scenario>_<combo>.pgm`` per combination, ``report.csv`` and
    ``evidence.log``; all outputs are byte-reproducible for a fixed seed.
    """
    from .scenario import load_scenario  # local import to avoid a cycle

    if scene is None:
        scene = load_scenario(run_cfg.scenario)
    scene = replace(scene, rng_seed=run_cfg.seed)
    combos = [combo_layers(label) for label in run_cfg.combos]

    gt = ground_truth_map(scene)
    result = run_pipeline(scene, run_cfg.params)
    queries = sample_queries(gt, run_cfg.n_queries, run_cfg.seed, run_cfg.min_separation)

    maps: dict[str, TraversabilityMap] = {}
    evaluations: dict[str, EvaluationResult] = {}
    rows = []
    rebuild_params = replace(run_cfg.params.rebuild, robot_radius=scene.robot_radius)
    for layers in combos:
        label = combo_label(layers)
        combo_map = build_combo_map(result, layers, priority=run_cfg.params.priority, params=rebuild_params)
        ev = evaluate_map(combo_map, gt, queries, run_cfg.failure_penalty)
        maps[label] = combo_map
        evaluations[label] = ev
        rows.append(ReportRow(label, scene.name, ev.score, ev.n_queries, ev.n_failed))
    report = QualityReport(rows)

    if run_cfg.out_dir is not None:
        import pathlib

        from .evidence import export_evidence_log

        out = pathlib.Path(run_cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "ground_truth.pgm").write_bytes(export_pgm(gt))
        for label, combo_map in maps.items():
            (out / f"{scene.name}_{label}.pgm").write_bytes(export_pgm(combo_map))
        (out / "report.csv").write_text(report.to_csv(), encoding="ascii")
        (out / "evidence.log").write_text(export_evidence_log(result.store), encoding="ascii")
    return AblationOutput(report, gt, maps, queries, evaluations, result)
