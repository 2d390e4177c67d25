"""Synthetic indoor scenes: geometry, trajectories, pinhole projection, occlusion.

Replaces the real sensing stack with a deterministic simulator.  A scene is a
3 m x 6 m floor populated with table-sized boxes arranged to leave an I-, L-
or T-shaped walkway, one or more walking humans, and an observer robot that
circles the scene with a side-mounted monocular camera.  The simulator emits
per-frame feature observations (with ground-truth visibility flags), human
detections as bounding boxes, and odometry, plus the noiseless ground truth
needed by oracle tests.

Conventions: world yaw 0 looks along +x; the camera frame has z along the
optical axis, x to the right of heading and y down, so at yaw 0 "right" is
world -y.  Image coordinates are pixels with (0, 0) at the top-left corner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .gridmap import CellState, TraversabilityMap, new_map
from .posegraph import Pose2, se2_compose, se2_inverse, wrap_angle

__all__ = [
    "HUMAN_BODY_RADIUS",
    "CameraIntrinsics",
    "ObstacleBox",
    "AgentTrajectory",
    "SceneConfig",
    "FeatureObservation",
    "HumanDetection",
    "FrameObservation",
    "GroundTruth",
    "BehindCameraError",
    "builtin_config",
    "ground_truth_map",
    "project_point",
    "occlusion_test",
    "simulate_sequence",
]

#: Humans are modeled as vertical cylinders of this radius (m) for occlusion
#: and bounding-box width.
HUMAN_BODY_RADIUS = 0.25

#: Vertical sampling step (m) along the body axis when deciding the visible extent.
_BODY_SAMPLE_STEP = 0.05

#: Numerical slack for ray-volume penetration tests; grazing contact is visible.
_RAY_EPS = 1e-9

_HUMAN_HEIGHT_RANGE = (1.52, 1.83)


class BehindCameraError(ValueError):
    """Projection requested for a point at or behind the camera plane."""


@dataclass(frozen=True)
class CameraIntrinsics:
    f: float
    cx: float
    cy: float
    image_width: int
    image_height: int
    cam_height: float

    def __post_init__(self):
        if self.f <= 0:
            raise ValueError("focal length must be positive")
        if not (0 <= self.cx < self.image_width and 0 <= self.cy < self.image_height):
            raise ValueError("principal point must lie inside the image")


@dataclass(frozen=True)
class ObstacleBox:
    """Axis box in its own frame: footprint half extents, height from the floor."""

    center: tuple[float, float]
    half_extents: tuple[float, float]
    top_height: float
    yaw: float = 0.0

    def __post_init__(self):
        if min(self.half_extents) <= 0 or self.top_height <= 0:
            raise ValueError("obstacle extents and height must be positive")

    def footprint_distance(self, x: float, y: float) -> float:
        """Euclidean distance from a point to the (closed) footprint rectangle."""
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        dx, dy = x - self.center[0], y - self.center[1]
        lx = c * dx + s * dy
        ly = -s * dx + c * dy
        ex = max(abs(lx) - self.half_extents[0], 0.0)
        ey = max(abs(ly) - self.half_extents[1], 0.0)
        return math.hypot(ex, ey)


@dataclass(frozen=True)
class AgentTrajectory:
    """Piecewise-linear timed path; yaw interpolates along the shortest arc."""

    role: str  # "human" | "robot"
    waypoints: tuple[tuple[float, tuple[float, float, float]], ...]
    body_height: Optional[float] = None

    def __post_init__(self):
        if self.role not in ("human", "robot"):
            raise ValueError(f"unknown agent role {self.role!r}")
        times = [t for t, _ in self.waypoints]
        if len(times) < 1:
            raise ValueError("trajectory needs at least one waypoint")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("waypoint timestamps must be strictly increasing")
        if self.role == "human":
            if self.body_height is None:
                raise ValueError("human trajectories need a body height")
            lo, hi = _HUMAN_HEIGHT_RANGE
            if not (lo <= self.body_height <= hi):
                raise ValueError(f"body height {self.body_height} outside [{lo}, {hi}] m")

    @property
    def duration(self) -> float:
        return self.waypoints[-1][0]

    def pose_at(self, t: float) -> tuple[float, float, float]:
        """Pose at time t, clamped to the first/last waypoint outside the range."""
        wps = self.waypoints
        if t <= wps[0][0]:
            return wps[0][1]
        if t >= wps[-1][0]:
            return wps[-1][1]
        for (t0, p0), (t1, p1) in zip(wps, wps[1:]):
            if t0 <= t <= t1:
                frac = (t - t0) / (t1 - t0)
                x = p0[0] + frac * (p1[0] - p0[0])
                y = p0[1] + frac * (p1[1] - p0[1])
                yaw = wrap_angle(p0[2] + frac * wrap_angle(p1[2] - p0[2]))
                return (x, y, yaw)
        raise AssertionError("unreachable")


@dataclass
class SceneConfig:
    bounds: tuple[float, float, float, float]
    obstacles: list[ObstacleBox]
    humans: list[AgentTrajectory]
    robot: AgentTrajectory
    intrinsics: CameraIntrinsics
    fps: float = 30.0
    feature_spacing: float = 0.10
    robot_radius: float = 0.5
    rng_seed: int = 0
    odom_sigma_trans: float = 0.0
    odom_sigma_rot: float = 0.0
    #: Camera optical axis offset from robot heading (side-facing mount).
    camera_yaw_offset: float = math.pi / 2
    name: str = "scene"


@dataclass(frozen=True)
class FeatureObservation:
    feature_id: int
    u: float
    v: float
    depth: float
    visible: bool


@dataclass(frozen=True)
class HumanDetection:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    depth: float
    world: tuple[float, float]
    agent_index: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("degenerate detection box")

    @property
    def center_u(self) -> float:
        return 0.5 * (self.x_min + self.x_max)


@dataclass
class FrameObservation:
    frame_index: int
    timestamp: float
    camera_pose: tuple[float, float, float]
    angular_speed: float
    odometry: Optional[tuple[float, float, float]]
    features: list[FeatureObservation] = field(default_factory=list)
    detections: list[HumanDetection] = field(default_factory=list)


@dataclass
class GroundTruth:
    """Noiseless trajectories and geometry for oracle checks."""

    camera_poses: list[tuple[float, float, float]]
    feature_points: dict[int, tuple[float, float, float]]
    human_positions: list[list[tuple[float, float]]]


# ---------------------------------------------------------------------------
# projection


def _project_many(intr: CameraIntrinsics, cam_pose: tuple[float, float, float], pts: np.ndarray):
    """Project Nx3 world points; returns (u, v, depth) without any masking."""
    cam_x, cam_y, yaw = cam_pose
    c = np.cos(yaw)
    s = np.sin(yaw)
    dx = pts[:, 0] - cam_x
    dy = pts[:, 1] - cam_y
    depth = c * dx + s * dy
    lateral = s * dx - c * dy  # to the right of heading
    down = intr.cam_height - pts[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = intr.cx + intr.f * lateral / depth
        v = intr.cy + intr.f * down / depth
    return u, v, depth


def project_point(
    intr: CameraIntrinsics,
    cam_pose: tuple[float, float, float],
    p: tuple[float, float, float],
) -> tuple[float, float, float]:
    """Pinhole projection of a world point; raises for points not in front."""
    pts = np.array([p], dtype=float)
    u, v, depth = _project_many(intr, cam_pose, pts)
    if depth[0] <= 0:
        raise BehindCameraError(f"point {p} is behind the camera (depth {depth[0]:.3f})")
    return float(u[0]), float(v[0]), float(depth[0])


# ---------------------------------------------------------------------------
# occlusion


def _box_blocked(origin: np.ndarray, targets: np.ndarray, box: ObstacleBox) -> np.ndarray:
    """True where the segment origin->target penetrates the box volume."""
    c, s = math.cos(box.yaw), math.sin(box.yaw)
    rot = np.array([[c, s], [-s, c]])
    o2 = rot @ (origin[:2] - np.asarray(box.center))
    t2 = (targets[:, :2] - np.asarray(box.center)) @ rot.T
    o = np.array([o2[0], o2[1], origin[2]])
    t3 = np.column_stack([t2[:, 0], t2[:, 1], targets[:, 2]])
    lo = np.array([-box.half_extents[0], -box.half_extents[1], 0.0])
    hi = np.array([box.half_extents[0], box.half_extents[1], box.top_height])
    d = t3 - o[None, :]
    t_enter = np.zeros(len(targets))
    t_exit = np.full(len(targets), 1.0 - _RAY_EPS)
    for axis in range(3):
        da = d[:, axis]
        oa = o[axis]
        parallel = np.abs(da) < 1e-12
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = (lo[axis] - oa) / da
            t2_ = (hi[axis] - oa) / da
        tn = np.minimum(t1, t2_)
        tf = np.maximum(t1, t2_)
        inside = (lo[axis] <= oa) & (oa <= hi[axis])
        tn = np.where(parallel, np.where(inside, -np.inf, np.inf), tn)
        tf = np.where(parallel, np.where(inside, np.inf, -np.inf), tf)
        t_enter = np.maximum(t_enter, tn)
        t_exit = np.minimum(t_exit, tf)
    return (t_exit - t_enter) > _RAY_EPS


def _cylinder_blocked(
    origin: np.ndarray,
    targets: np.ndarray,
    axis_xy: tuple[float, float],
    radius: float,
    height: float,
) -> np.ndarray:
    """True where the segment origin->target penetrates the vertical cylinder."""
    ox = origin[0] - axis_xy[0]
    oy = origin[1] - axis_xy[1]
    d = targets - origin[None, :]
    a = d[:, 0] ** 2 + d[:, 1] ** 2
    b = 2.0 * (ox * d[:, 0] + oy * d[:, 1])
    c0 = ox * ox + oy * oy - radius * radius
    disc = b * b - 4.0 * a * c0
    sq = np.sqrt(np.maximum(disc, 0.0))
    tiny = a < 1e-18
    with np.errstate(divide="ignore", invalid="ignore"):
        t_lo = (-b - sq) / (2.0 * a)
        t_hi = (-b + sq) / (2.0 * a)
    inside_circle = c0 <= 0.0
    t_lo = np.where(tiny, np.where(inside_circle, -np.inf, np.inf), t_lo)
    t_hi = np.where(tiny, np.where(inside_circle, np.inf, -np.inf), t_hi)
    empty = disc < 0.0
    t_lo = np.where(empty & ~tiny, np.inf, t_lo)
    t_hi = np.where(empty & ~tiny, -np.inf, t_hi)
    dz = d[:, 2]
    oz = origin[2]
    flat = np.abs(dz) < 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        z1 = (0.0 - oz) / dz
        z2 = (height - oz) / dz
    z_lo = np.minimum(z1, z2)
    z_hi = np.maximum(z1, z2)
    inside_z = (0.0 <= oz) & (oz <= height)
    z_lo = np.where(flat, np.where(inside_z, -np.inf, np.inf), z_lo)
    z_hi = np.where(flat, np.where(inside_z, np.inf, -np.inf), z_hi)
    t_enter = np.maximum(np.maximum(t_lo, z_lo), 0.0)
    t_exit = np.minimum(np.minimum(t_hi, z_hi), 1.0 - _RAY_EPS)
    return (t_exit - t_enter) > _RAY_EPS


def _blocked_any(
    origin: np.ndarray,
    targets: np.ndarray,
    obstacles: Sequence[ObstacleBox],
    cylinders: Sequence[tuple[tuple[float, float], float]],
) -> np.ndarray:
    blocked = np.zeros(len(targets), dtype=bool)
    for box in obstacles:
        todo = ~blocked
        if not todo.any():
            break
        blocked[todo] |= _box_blocked(origin, targets[todo], box)
    for axis_xy, height in cylinders:
        todo = ~blocked
        if not todo.any():
            break
        blocked[todo] |= _cylinder_blocked(origin, targets[todo], axis_xy, HUMAN_BODY_RADIUS, height)
    return blocked


def occlusion_test(
    cam_pose: tuple[float, float, float],
    cam_height: float,
    target: tuple[float, float, float],
    obstacles: Sequence[ObstacleBox],
    humans: Sequence[tuple[tuple[float, float], float]] = (),
    exclude_human: Optional[int] = None,
) -> bool:
    """True when the line of sight from the camera to ``target`` is clear.

    ``humans`` holds ((x, y), body_height) cylinders; ``exclude_human`` skips
    the target's own body.
    """
    origin = np.array([cam_pose[0], cam_pose[1], cam_height])
    targets = np.array([target], dtype=float)
    cylinders = [h for idx, h in enumerate(humans) if idx != exclude_human]
    return not bool(_blocked_any(origin, targets, obstacles, cylinders)[0])


# ---------------------------------------------------------------------------
# ground truth


def ground_truth_map(cfg: SceneConfig, resolution: float = 0.10) -> TraversabilityMap:
    """C-space reference map: footprints inflated by the robot radius are blocked."""
    x_min, y_min, x_max, y_max = cfg.bounds
    m = new_map(x_min, y_min, x_max, y_max, resolution)
    m.cells[:, :] = int(CellState.TRAVERSABLE)
    xs = x_min + (np.arange(m.width) + 0.5) * resolution
    ys = y_min + (np.arange(m.height) + 0.5) * resolution
    X, Y = np.meshgrid(xs, ys)
    r = cfg.robot_radius
    for box in cfg.obstacles:
        c, s = math.cos(box.yaw), math.sin(box.yaw)
        dx = X - box.center[0]
        dy = Y - box.center[1]
        lx = c * dx + s * dy
        ly = -s * dx + c * dy
        ex = np.maximum(np.abs(lx) - box.half_extents[0], 0.0)
        ey = np.maximum(np.abs(ly) - box.half_extents[1], 0.0)
        blocked = ex * ex + ey * ey <= r * r
        m.cells[blocked] = int(CellState.UNTRAVERSABLE)
    return m


# ---------------------------------------------------------------------------
# feature sampling


def sample_feature_points(cfg: SceneConfig) -> dict[int, tuple[float, float, float]]:
    """Deterministic corner-like points along footprint edges at two heights."""
    features: dict[int, tuple[float, float, float]] = {}
    fid = 0
    for box in cfg.obstacles:
        hx, hy = box.half_extents
        corners = [(-hx, -hy), (hx, -hy), (hx, hy), (-hx, hy)]
        c, s = math.cos(box.yaw), math.sin(box.yaw)
        heights = sorted({0.1, box.top_height})
        for k in range(4):
            ax, ay = corners[k]
            bx, by = corners[(k + 1) % 4]
            length = math.hypot(bx - ax, by - ay)
            n_pts = max(1, math.floor(length / cfg.feature_spacing + 1e-9))
            for m_idx in range(n_pts):
                frac = m_idx * cfg.feature_spacing / length
                lx = ax + frac * (bx - ax)
                ly = ay + frac * (by - ay)
                wx = box.center[0] + c * lx - s * ly
                wy = box.center[1] + s * lx + c * ly
                for z in heights:
                    features[fid] = (wx, wy, z)
                    fid += 1
    return features


# ---------------------------------------------------------------------------
# simulation


def _relative_pose(a: tuple[float, float, float], b: tuple[float, float, float]) -> Pose2:
    return se2_compose(se2_inverse(Pose2(*a)), Pose2(*b))


def simulate_sequence(cfg: SceneConfig) -> tuple[list[FrameObservation], GroundTruth]:
    """Render the full observation sequence at cfg.fps, plus ground truth.

    Frames run from t=0 through the end of the robot trajectory, endpoints
    inclusive.  Identical configs (including rng_seed) produce identical
    output.
    """
    intr = cfg.intrinsics
    rng = np.random.default_rng(cfg.rng_seed)
    add_noise = cfg.odom_sigma_trans > 0 or cfg.odom_sigma_rot > 0

    feature_points = sample_feature_points(cfg)
    fid_order = sorted(feature_points)
    F = np.array([feature_points[fid] for fid in fid_order], dtype=float) if fid_order else np.zeros((0, 3))

    duration = cfg.robot.duration
    n_frames = int(math.floor(duration * cfg.fps + 1e-9)) + 1

    cam_poses: list[tuple[float, float, float]] = []
    for k in range(n_frames):
        t = k / cfg.fps
        rx, ry, heading = cfg.robot.pose_at(t)
        cam_poses.append((rx, ry, wrap_angle(heading + cfg.camera_yaw_offset)))

    frames: list[FrameObservation] = []
    human_positions: list[list[tuple[float, float]]] = []
    for k in range(n_frames):
        t = k / cfg.fps
        cam = cam_poses[k]
        origin = np.array([cam[0], cam[1], intr.cam_height])

        if k == 0:
            omega = 0.0
            odom = None
        else:
            rel = _relative_pose(cam_poses[k - 1], cam)
            omega = wrap_angle(cam[2] - cam_poses[k - 1][2]) * cfg.fps
            if add_noise:
                eps = rng.normal(0.0, 1.0, size=3)
                rel = Pose2(
                    rel.x + cfg.odom_sigma_trans * eps[0],
                    rel.y + cfg.odom_sigma_trans * eps[1],
                    rel.theta + cfg.odom_sigma_rot * eps[2],
                )
            odom = rel.as_tuple()

        humans_t = [h.pose_at(t) for h in cfg.humans]
        human_xy = [(p[0], p[1]) for p in humans_t]
        human_positions.append(human_xy)
        cylinders = [(xy, h.body_height) for xy, h in zip(human_xy, cfg.humans)]

        feature_obs: list[FeatureObservation] = []
        if len(F):
            u, v, depth = _project_many(intr, cam, F)
            cand = (depth > _RAY_EPS) & (u >= 0) & (u < intr.image_width) & (v >= 0) & (v < intr.image_height)
            idx = np.flatnonzero(cand)
            if len(idx):
                blocked = _blocked_any(origin, F[idx], cfg.obstacles, cylinders)
                for pos, row in enumerate(idx):
                    feature_obs.append(
                        FeatureObservation(
                            fid_order[row],
                            float(u[row]),
                            float(v[row]),
                            float(depth[row]),
                            not bool(blocked[pos]),
                        )
                    )

        detections: list[HumanDetection] = []
        for h_idx, (h, (hx, hy)) in enumerate(zip(cfg.humans, human_xy)):
            other_cyl = [cyl for c_idx, cyl in enumerate(cylinders) if c_idx != h_idx]
            bh = h.body_height
            n_axis = int(round(bh / _BODY_SAMPLE_STEP)) + 1
            heights = np.linspace(0.0, bh, n_axis)
            axis_pts = np.column_stack([np.full(n_axis, hx), np.full(n_axis, hy), heights])
            u_a, v_a, z_a = _project_many(intr, cam, axis_pts)
            if z_a[-1] <= _RAY_EPS:
                continue
            head_u, head_v = u_a[-1], v_a[-1]
            if not (0 <= head_u < intr.image_width and 0 <= head_v < intr.image_height):
                continue
            blocked = _blocked_any(origin, axis_pts, cfg.obstacles, other_cyl)
            if blocked[-1]:
                continue  # head occluded: no detection
            vis_v = v_a[~blocked]
            y_min = float(vis_v.min())
            y_max = float(vis_v.max())
            half_w = intr.f * HUMAN_BODY_RADIUS / float(z_a[-1])
            if y_max <= y_min:
                y_max = y_min + 1e-6  # single visible sample: keep the box valid
            detections.append(
                HumanDetection(
                    float(head_u) - half_w,
                    float(head_u) + half_w,
                    y_min,
                    y_max,
                    float(z_a[-1]),
                    (hx, hy),
                    h_idx,
                )
            )

        frames.append(FrameObservation(k, t, cam, omega, odom, feature_obs, detections))

    truth = GroundTruth(cam_poses, feature_points, human_positions)
    return frames, truth


# ---------------------------------------------------------------------------
# built-in scenarios

_TABLE_HALF = (0.3, 1.25)  # 0.6 m x 2.5 m footprint
_TABLE_TOP = 0.7
# Tall frame: heads of nearby humans (~1.2 m away) must stay above the horizon
# row yet inside the image for the height-based range model to see them.
_CAMERA = CameraIntrinsics(f=400.0, cx=320.0, cy=360.0, image_width=640, image_height=720, cam_height=0.85)


def _heading(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.atan2(b[1] - a[1], b[0] - a[0])


def _walk_waypoints(
    polyline: Sequence[tuple[float, float]],
    speed: float,
    turn_seconds: float,
    until: Optional[float] = None,
) -> tuple[tuple[float, tuple[float, float, float]], ...]:
    """Waypoints walking a polyline; with ``until`` set, shuttle back and forth."""
    pts = list(polyline)
    wps: list[tuple[float, tuple[float, float, float]]] = []
    t = 0.0
    pos = pts[0]
    yaw = _heading(pts[0], pts[1])
    wps.append((t, (pos[0], pos[1], yaw)))
    forward = True
    while True:
        seq = pts if forward else pts[::-1]
        for a, b in zip(seq, seq[1:]):
            new_yaw = _heading(a, b)
            if new_yaw != yaw:
                t += turn_seconds
                yaw = new_yaw
                wps.append((t, (a[0], a[1], yaw)))
            t += math.hypot(b[0] - a[0], b[1] - a[1]) / speed
            wps.append((t, (b[0], b[1], yaw)))
        if until is None or t >= until:
            return tuple(wps)
        forward = not forward


def _perimeter_robot() -> AgentTrajectory:
    """Counterclockwise loop around the scene; the +90 deg camera faces inward.

    Legs run at 0.3 m/s with 2 s corner turns, closing the 16.2 m loop in 60 s.
    """
    half_pi = math.pi / 2
    wps = (
        (0.0, (0.25, 0.3, 0.0)),
        (9.0, (2.95, 0.3, 0.0)),
        (11.0, (2.95, 0.3, half_pi)),
        (29.0, (2.95, 5.7, half_pi)),
        (31.0, (2.95, 5.7, math.pi)),
        (40.0, (0.25, 5.7, math.pi)),
        (42.0, (0.25, 5.7, -half_pi)),
        (60.0, (0.25, 0.3, -half_pi)),
    )
    return AgentTrajectory("robot", wps)


def builtin_config(kind: str) -> SceneConfig:
    """Deterministic I / L / T scene in the standard 3 m x 6 m area.

    Two 0.6 x 2.5 m tables (top 0.7 m) flank a 1.2 m walkway; the L and T
    variants add one table rotated 90 degrees.  The aisle is kept one cell
    wider than twice the robot radius so the inflated ground-truth map retains
    a corridor for the journey metric.
    """
    kind = kind.upper()
    if kind == "I":
        obstacles = [
            ObstacleBox((0.8, 3.0), _TABLE_HALF, _TABLE_TOP),
            ObstacleBox((2.6, 3.0), _TABLE_HALF, _TABLE_TOP),
        ]
        humans = [
            AgentTrajectory(
                "human",
                _walk_waypoints([(1.7, 0.5), (1.7, 5.5)], speed=0.9, turn_seconds=0.2, until=61.0),
                body_height=1.70,
            )
        ]
    elif kind == "L":
        obstacles = [
            ObstacleBox((0.8, 2.0), _TABLE_HALF, _TABLE_TOP),
            ObstacleBox((2.6, 2.0), _TABLE_HALF, _TABLE_TOP),
            ObstacleBox((1.3, 4.75), _TABLE_HALF, _TABLE_TOP, yaw=math.pi / 2),
        ]
        # The L walker makes one slow pass (exactly one turn), then waits at
        # the arm end.  A companion keeps clear of the stem until the walker
        # is done with it, then shuttles the same lane so the trail covers the
        # corridor across the later robot legs too.
        half_pi = math.pi / 2
        shuttle = [
            (0.0, (2.5, 0.2, half_pi)),
            (29.0, (2.5, 0.2, half_pi)),
            (31.0, (1.7, 0.5, half_pi)),
        ]
        t, y, heading = 31.0, 0.5, half_pi
        while t < 61.0:
            y_next = 3.3 if y == 0.5 else 0.5
            t += abs(y_next - y) / 0.55
            shuttle.append((t, (1.7, y_next, heading)))
            y = y_next
            t += 0.2
            heading = -heading
            shuttle.append((t, (1.7, y, heading)))
        humans = [
            AgentTrajectory(
                "human",
                (
                    (0.0, (1.7, 0.3, half_pi)),
                    (27.0, (1.7, 3.85, half_pi)),
                    (27.2, (1.7, 3.85, 0.0)),
                    (34.0, (2.55, 3.85, 0.0)),
                ),
                body_height=1.70,
            ),
            AgentTrajectory("human", tuple(shuttle), body_height=1.70),
        ]
    elif kind == "T":
        obstacles = [
            ObstacleBox((0.8, 1.75), _TABLE_HALF, _TABLE_TOP),
            ObstacleBox((2.6, 1.75), _TABLE_HALF, _TABLE_TOP),
            ObstacleBox((1.5, 4.8), _TABLE_HALF, _TABLE_TOP, yaw=math.pi / 2),
        ]
        humans = [
            AgentTrajectory(
                "human",
                _walk_waypoints([(1.5, 0.4), (1.5, 3.75), (0.6, 3.75)], speed=0.55, turn_seconds=0.2, until=61.0),
                body_height=1.70,
            ),
            AgentTrajectory(
                "human",
                _walk_waypoints([(2.0, 0.6), (2.0, 3.75), (2.6, 3.75)], speed=0.55, turn_seconds=0.2, until=61.0),
                body_height=1.78,
            ),
        ]
    else:
        raise ValueError(f"unknown builtin scenario {kind!r} (expected I, L or T)")
    return SceneConfig(
        bounds=(0.0, 0.0, 3.0, 6.0),
        obstacles=obstacles,
        humans=humans,
        robot=_perimeter_robot(),
        intrinsics=_CAMERA,
        name=kind,
    )
