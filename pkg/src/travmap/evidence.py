"""Traversability evidence: depth model, occlusion ordering, re-anchorable store.

Three evidence streams feed the map.  Feature landmarks mark untraversable
disks (static objects).  Human trail points mark traversable trails.  Pairs
of landmarks a human passed between mark traversable bands.  Every record is
pose-free: landmarks and trail points are stored as offsets in their anchor
keyframe's frame, and pass-between records are just feature-id pairs, so a
pose-graph optimization invalidates nothing.  ``rebuild_map`` regenerates the
map from any pose snapshot in O(records).

Monocular range to a human follows from apparent height: with calibration
factor k, distance = k * f * H / h_px.  The apparent height h_px fed by the
pipeline is anchored at the head pixel row, which stays measurable when the
lower body is occluded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from statistics import median
from typing import Iterable, Mapping, Optional, Sequence, Union

from .gridmap import (
    CellState,
    DEFAULT_PRIORITY,
    LayerPriority,
    TraversabilityMap,
    empty_like,
    fuse,
)
from .posegraph import Pose2, se2_transform
from .scenesim import CameraIntrinsics

__all__ = [
    "ScaleCalibration",
    "Landmark",
    "OcclusionClass",
    "SfmEvidence",
    "PfhEvidence",
    "Ho3Evidence",
    "EvidenceRecord",
    "EvidenceError",
    "EvidenceStore",
    "RebuildParams",
    "calibrate_scale",
    "estimate_depth",
    "apparent_height_px",
    "human_map_position",
    "classify_occlusion",
    "infer_pass_pair",
    "rebuild_map",
    "export_evidence_log",
]

SFM_LAYER = "sfm"
PFH_LAYER = "pfh"
HO3_LAYER = "ho3"
ALL_LAYERS = (SFM_LAYER, PFH_LAYER, HO3_LAYER)


class EvidenceError(KeyError):
    """Evidence references a keyframe or feature the snapshot cannot resolve."""


@dataclass(frozen=True)
class ScaleCalibration:
    """Scale factor k relating SLAM map units to metric height-based range."""

    k: float

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("scale factor must be positive")


@dataclass(frozen=True)
class Landmark:
    """Floor-projected feature point, stored relative to its anchor keyframe."""

    feature_id: int
    anchor_keyframe: int
    offset: tuple[float, float]

    def world(self, snapshot: Mapping[int, Pose2]) -> tuple[float, float]:
        try:
            anchor = snapshot[self.anchor_keyframe]
        except KeyError:
            raise EvidenceError(f"landmark {self.feature_id} anchored to unknown keyframe {self.anchor_keyframe}") from None
        return se2_transform(anchor, self.offset)


class OcclusionClass(Enum):
    FRONT = "front"
    BEHIND = "behind"
    UNRELATED = "unrelated"


@dataclass
class SfmEvidence:
    feature_id: int
    weight: int = 1


@dataclass
class PfhEvidence:
    keyframe_id: int
    offset: tuple[float, float]
    track_id: int
    weight: int = 1


@dataclass
class Ho3Evidence:
    front_id: int
    behind_id: int
    track_id: int
    weight: int = 1

    def __post_init__(self):
        if self.front_id == self.behind_id:
            raise ValueError("pass-between pair needs two distinct features")


EvidenceRecord = Union[SfmEvidence, PfhEvidence, Ho3Evidence]


def calibrate_scale(samples: Iterable[tuple[float, float, float, float]]) -> ScaleCalibration:
    """Median of per-sample k = slam_distance * h_px / (f * H).

    Each sample is (slam_distance, focal_px, apparent_height_px, body_height_m);
    the median keeps single bad samples from skewing the scale.
    """
    ks = []
    for slam_distance, f, h_px, big_h in samples:
        if min(slam_distance, f, h_px, big_h) <= 0:
            raise ValueError(f"calibration sample values must be positive: {(slam_distance, f, h_px, big_h)}")
        ks.append(slam_distance * h_px / (f * big_h))
    if not ks:
        raise ValueError("need at least one calibration sample")
    return ScaleCalibration(median(ks))


def estimate_depth(cal: ScaleCalibration, f: float, body_height: float, h_px: float) -> float:
    """Range to a human of height ``body_height`` appearing ``h_px`` pixels tall."""
    if h_px <= 0:
        raise ValueError("apparent height must be positive")
    return cal.k * f * body_height / h_px


def apparent_height_px(y_min: float, intr: CameraIntrinsics, body_height: float) -> Optional[float]:
    """Full-body pixel height reconstructed from the head row of a detection.

    The head is the one body point guaranteed measurable whenever a detection
    exists, so the apparent height is inferred from how far the head row sits
    above the horizon instead of from the (possibly clipped) box height.
    Returns None when the geometry degenerates (head at or below the horizon).
    """
    if body_height <= intr.cam_height:
        return None
    rows_above_horizon = intr.cy - y_min
    if rows_above_horizon <= 0:
        return None
    return rows_above_horizon * body_height / (body_height - intr.cam_height)


def human_map_position(
    cam_pose: tuple[float, float, float],
    intr: CameraIntrinsics,
    bbox: tuple[float, float, float, float],
    depth: float,
) -> tuple[float, float]:
    """Floor-plane position of a detection given its estimated range."""
    if depth <= 0:
        raise ValueError("depth must be positive")
    x, y, yaw = cam_pose
    u = 0.5 * (bbox[0] + bbox[1])
    lateral = depth * (u - intr.cx) / intr.f  # to the right of heading
    c, s = math.cos(yaw), math.sin(yaw)
    # heading = (c, s); right of heading = (s, -c)
    return (x + depth * c + lateral * s, y + depth * s - lateral * c)


def classify_occlusion(
    u: float,
    visible: bool,
    bbox: tuple[float, float, float, float],
    feature_depth: Optional[float] = None,
    human_depth: Optional[float] = None,
) -> OcclusionClass:
    """Order one feature against a human region.

    Default rule: a feature observed inside the region occludes the human
    (FRONT); a landmark predicted inside the region but unobserved is occluded
    by the human (BEHIND).  When both depths are supplied the decision is made
    by direct comparison instead, which serves as the cross-validation oracle.
    """
    if not (bbox[0] <= u <= bbox[1]):
        return OcclusionClass.UNRELATED
    if feature_depth is not None and human_depth is not None:
        return OcclusionClass.FRONT if feature_depth < human_depth else OcclusionClass.BEHIND
    return OcclusionClass.FRONT if visible else OcclusionClass.BEHIND


@dataclass(frozen=True)
class ClassifiedFeature:
    feature_id: int
    label: OcclusionClass
    u: float
    depth: Optional[float] = None


def infer_pass_pair(
    classified: Sequence[ClassifiedFeature],
    human_depth: Optional[float],
    human_center_u: float,
) -> Optional[tuple[int, int]]:
    """Tightest (front, behind) feature pair bracketing the human, if any.

    With depths available the front feature is the deepest one still nearer
    than the human and the behind feature the shallowest one still farther;
    otherwise proximity to the box center decides.  Ties go to the lower id.
    """
    fronts = [c for c in classified if c.label is OcclusionClass.FRONT]
    behinds = [c for c in classified if c.label is OcclusionClass.BEHIND]
    depths_known = (
        human_depth is not None
        and all(c.depth is not None for c in fronts)
        and all(c.depth is not None for c in behinds)
    )
    if depths_known:
        fronts = [c for c in fronts if c.depth < human_depth]
        behinds = [c for c in behinds if c.depth > human_depth]
    if not fronts or not behinds:
        return None
    if depths_known:
        front = min(fronts, key=lambda c: (human_depth - c.depth, c.feature_id))
        behind = min(behinds, key=lambda c: (c.depth - human_depth, c.feature_id))
    else:
        front = min(fronts, key=lambda c: (abs(c.u - human_center_u), c.feature_id))
        behind = min(behinds, key=lambda c: (abs(c.u - human_center_u), c.feature_id))
    if front.feature_id == behind.feature_id:
        return None
    return (front.feature_id, behind.feature_id)


class EvidenceStore:
    """Insertion-ordered evidence log with duplicate folding."""

    def __init__(self):
        self.records: list[EvidenceRecord] = []
        self._sfm: dict[int, SfmEvidence] = {}
        self._ho3: dict[tuple[int, int, int], Ho3Evidence] = {}

    def add_sfm(self, feature_id: int) -> None:
        rec = self._sfm.get(feature_id)
        if rec is None:
            rec = SfmEvidence(feature_id)
            self._sfm[feature_id] = rec
            self.records.append(rec)
        else:
            rec.weight += 1

    def add_pfh(self, keyframe_id: int, offset: tuple[float, float], track_id: int) -> None:
        self.records.append(PfhEvidence(keyframe_id, offset, track_id))

    def add_ho3(self, front_id: int, behind_id: int, track_id: int) -> None:
        key = (front_id, behind_id, track_id)
        rec = self._ho3.get(key)
        if rec is None:
            rec = Ho3Evidence(front_id, behind_id, track_id)
            self._ho3[key] = rec
            self.records.append(rec)
        else:
            rec.weight += 1

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class RebuildParams:
    """Rasterization radii (meters) used when regenerating maps."""

    robot_radius: float = 0.5
    trail_half_width: float = 0.2
    passage_half_width: float = 0.3


def rebuild_map(
    store: EvidenceStore,
    snapshot: Mapping[int, Pose2],
    landmarks: Mapping[int, Landmark],
    base: TraversabilityMap,
    enabled: Iterable[str] = ALL_LAYERS,
    priority: LayerPriority = DEFAULT_PRIORITY,
    params: RebuildParams = RebuildParams(),
) -> TraversabilityMap:
    """Regenerate the traversability map from evidence at the given poses.

    Landmark disks (inflated by the robot radius) are untraversable; trail
    capsules and pass-between bands are traversable.  When both human-derived
    layers are enabled a cell counts as human-traversable only where both mark
    it; the final map fuses the enabled layers by priority.  Cost is linear in
    the number of records regardless of how many optimizations happened.
    """
    enabled = tuple(enabled)
    for layer in enabled:
        if layer not in ALL_LAYERS:
            raise ValueError(f"unknown evidence layer {layer!r}")
    if not enabled:
        raise ValueError("need at least one enabled layer")
    layers = {layer: empty_like(base) for layer in enabled}
    last_trail_point: dict[int, tuple[float, float]] = {}
    for rec in store.records:
        if isinstance(rec, SfmEvidence):
            if SFM_LAYER not in layers:
                continue
            lm = _lookup_landmark(landmarks, rec.feature_id)
            w = lm.world(snapshot)
            layers[SFM_LAYER].mark_band(w, w, params.robot_radius, CellState.UNTRAVERSABLE)
        elif isinstance(rec, PfhEvidence):
            if PFH_LAYER not in layers:
                continue
            try:
                pose = snapshot[rec.keyframe_id]
            except KeyError:
                raise EvidenceError(f"trail evidence anchored to unknown keyframe {rec.keyframe_id}") from None
            w = se2_transform(pose, rec.offset)
            prev = last_trail_point.get(rec.track_id)
            layers[PFH_LAYER].mark_band(prev if prev is not None else w, w, params.trail_half_width, CellState.TRAVERSABLE)
            last_trail_point[rec.track_id] = w
        else:
            if HO3_LAYER not in layers:
                continue
            wa = _lookup_landmark(landmarks, rec.front_id).world(snapshot)
            wb = _lookup_landmark(landmarks, rec.behind_id).world(snapshot)
            layers[HO3_LAYER].mark_band(wa, wb, params.passage_half_width, CellState.TRAVERSABLE)
    if PFH_LAYER in layers and HO3_LAYER in layers:
        both = (layers[PFH_LAYER].cells == int(CellState.TRAVERSABLE)) & (
            layers[HO3_LAYER].cells == int(CellState.TRAVERSABLE)
        )
        for layer in (PFH_LAYER, HO3_LAYER):
            cells = layers[layer].cells
            cells[:, :] = int(CellState.UNKNOWN)
            cells[both] = int(CellState.TRAVERSABLE)
    return fuse([(layers[layer], layer) for layer in enabled], priority)


def _lookup_landmark(landmarks: Mapping[int, Landmark], feature_id: int) -> Landmark:
    try:
        return landmarks[feature_id]
    except KeyError:
        raise EvidenceError(f"evidence references unknown feature {feature_id}") from None


def export_evidence_log(store: EvidenceStore) -> str:
    """One line per record, replayable for debugging."""
    lines = []
    for rec in store.records:
        if isinstance(rec, SfmEvidence):
            lines.append(f"SFM {rec.feature_id}")
        elif isinstance(rec, PfhEvidence):
            lines.append(f"PFH {rec.keyframe_id} {float(rec.offset[0])!r} {float(rec.offset[1])!r} {rec.track_id}")
        else:
            lines.append(f"HO3 {rec.front_id} {rec.behind_id} {rec.track_id} {rec.weight}")
    return "\n".join(lines) + ("\n" if lines else "")
