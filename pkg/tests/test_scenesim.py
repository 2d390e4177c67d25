import math

import pytest

from travmap.gridmap import CellState
from travmap.posegraph import wrap_angle
from travmap.scenesim import (
    AgentTrajectory,
    BehindCameraError,
    CameraIntrinsics,
    ObstacleBox,
    SceneConfig,
    builtin_config,
    ground_truth_map,
    occlusion_test,
    project_point,
    sample_feature_points,
    simulate_sequence,
)

INTR = CameraIntrinsics(f=500.0, cx=320.0, cy=240.0, image_width=640, image_height=480, cam_height=0.85)


# ---------------------------------------------------------------------------
# builtin scenes


def test_builtin_i_bounds_and_rates():
    cfg = builtin_config("I")
    assert cfg.bounds == (0.0, 0.0, 3.0, 6.0)
    assert cfg.fps == 30
    assert cfg.robot_radius == 0.5
    assert len(cfg.obstacles) == 2
    for box in cfg.obstacles:
        assert box.half_extents == (0.3, 1.25)  # 0.6 m x 2.5 m tables
        assert box.top_height == 0.7
    assert len(cfg.humans) == 1


def test_builtin_i_aisle_between_tables():
    a, b = builtin_config("I").obstacles
    gap = (b.center[0] - b.half_extents[0]) - (a.center[0] + a.half_extents[0])
    assert gap == pytest.approx(1.2)  # one cell wider than the inflated diameter


def test_builtin_l_single_turn():
    cfg = builtin_config("L")
    yaws = [wp[1][2] for wp in cfg.humans[0].waypoints]
    changes = [wrap_angle(b - a) for a, b in zip(yaws, yaws[1:]) if abs(wrap_angle(b - a)) > 1e-9]
    assert len(changes) == 1
    assert abs(changes[0]) == pytest.approx(math.pi / 2)


def test_builtin_t_has_two_walkers():
    cfg = builtin_config("T")
    assert len(cfg.humans) == 2
    assert len(cfg.obstacles) == 3


def test_builtin_rejects_unknown_kind():
    with pytest.raises(ValueError):
        builtin_config("X")


def test_human_height_validated():
    with pytest.raises(ValueError):
        AgentTrajectory("human", ((0.0, (0, 0, 0)), (1.0, (1, 0, 0))), body_height=2.5)


def test_waypoint_times_strictly_increasing():
    with pytest.raises(ValueError):
        AgentTrajectory("robot", ((0.0, (0, 0, 0)), (0.0, (1, 0, 0))))


# ---------------------------------------------------------------------------
# projection


def test_project_on_axis():
    u, v, depth = project_point(INTR, (0, 0, 0), (5, 0, 0.85))
    assert (u, v, depth) == (INTR.cx, INTR.cy, 5.0)


def test_project_lateral_point():
    u, v, depth = project_point(INTR, (0, 0, 0), (3, -0.6, 0.85))
    assert u == pytest.approx(INTR.cx + 100)
    assert v == pytest.approx(INTR.cy)
    assert depth == pytest.approx(3.0)


def test_project_behind_camera():
    with pytest.raises(BehindCameraError):
        project_point(INTR, (0, 0, 0), (-1, 0, 0.85))


def test_project_height_maps_down():
    # above the camera plane -> smaller v (image up)
    u, v, _ = project_point(INTR, (0, 0, 0), (2, 0, 1.7))
    assert v < INTR.cy


def test_project_respects_camera_yaw():
    u, v, depth = project_point(INTR, (1, 1, math.pi / 2), (1, 4, 0.85))
    assert u == pytest.approx(INTR.cx)
    assert depth == pytest.approx(3.0)


# ---------------------------------------------------------------------------
# occlusion


def _slab_at_x2():
    return ObstacleBox((2.0, 0.0), (0.05, 5.0), 0.7)


def test_occlusion_head_clears_slab():
    # line of sight rises over the slab: 0.85 + 2*(1.7-0.85)/4 = 1.275 > 0.7
    assert occlusion_test((0, 0, 0), 0.85, (4, 0, 1.7), [_slab_at_x2()])


def test_occlusion_feet_blocked_by_slab():
    # 0.85*(1 - 2/4) = 0.425 < 0.7
    assert not occlusion_test((0, 0, 0), 0.85, (4, 0, 0.0), [_slab_at_x2()])


def test_occlusion_empty_scene():
    assert occlusion_test((0, 0, 0), 0.85, (4, 0, 0.0), [])


def test_occlusion_human_cylinder_blocks():
    humans = [((2.0, 0.0), 1.7)]
    assert not occlusion_test((0, 0, 0), 0.85, (4, 0, 0.8), [], humans)
    # the target's own body never occludes itself
    assert occlusion_test((0, 0, 0), 0.85, (2, 0, 1.7), [], humans, exclude_human=0)
    # passing far to the side is clear
    assert occlusion_test((0, 0, 0), 0.85, (4, 3, 0.8), [], humans)


def test_occlusion_feature_on_near_face_visible():
    box = ObstacleBox((2.0, 0.0), (0.5, 0.5), 0.7)
    assert occlusion_test((0, 0, 0), 0.85, (1.5, 0.0, 0.7), [box])  # near top edge
    assert not occlusion_test((0, 0, 0), 0.85, (2.5, 0.0, 0.1), [box])  # far low edge


# ---------------------------------------------------------------------------
# ground truth map


def _minimal_scene(obstacles, humans=(), duration=1.0):
    robot = AgentTrajectory("robot", ((0.0, (0.25, 0.3, 0.0)), (duration, (0.25, 0.4, 0.0))))
    return SceneConfig(
        bounds=(0.0, 0.0, 3.0, 6.0),
        obstacles=list(obstacles),
        humans=list(humans),
        robot=robot,
        intrinsics=INTR,
        camera_yaw_offset=0.0,
    )


def test_ground_truth_empty_scene_all_traversable():
    gt = ground_truth_map(_minimal_scene([]))
    assert (gt.cells == int(CellState.TRAVERSABLE)).all()


def test_ground_truth_has_no_unknown():
    for kind in ("I", "L", "T"):
        gt = ground_truth_map(builtin_config(kind))
        assert (gt.cells != int(CellState.UNKNOWN)).all()


def test_ground_truth_inflation_boundary_closed():
    # footprint right edge at x=1.75; cell center (2.25, 3.05) is exactly 0.5 away
    box = ObstacleBox((1.45, 3.05), (0.3, 1.25), 0.7)
    gt = ground_truth_map(_minimal_scene([box]))
    assert gt.state(*gt.world_to_cell(2.25, 3.05)) is CellState.UNTRAVERSABLE
    assert gt.state(*gt.world_to_cell(2.35, 3.05)) is CellState.TRAVERSABLE


def test_ground_truth_rotated_box():
    box = ObstacleBox((1.5, 3.0), (0.3, 1.25), 0.7, yaw=math.pi / 2)
    gt = ground_truth_map(_minimal_scene([box]))
    # long axis now along x: (2.7, 3.0) inside footprint, (1.5, 4.0) 0.7 above it
    assert gt.state(*gt.world_to_cell(2.7, 3.0)) is CellState.UNTRAVERSABLE
    assert gt.state(*gt.world_to_cell(1.5, 4.05)) is CellState.TRAVERSABLE


# ---------------------------------------------------------------------------
# simulation


def test_frame_count_inclusive():
    frames, _ = simulate_sequence(builtin_config("I"))
    assert len(frames) == 1801  # 60 s at 30 fps, endpoints inclusive


def test_simulation_deterministic():
    cfg = builtin_config("I")
    a, _ = simulate_sequence(cfg)
    b, _ = simulate_sequence(cfg)
    assert a == b


def test_empty_scene_has_no_observations():
    frames, _ = simulate_sequence(_minimal_scene([]))
    assert all(not f.features and not f.detections for f in frames)


def test_features_roundtrip_through_project_point():
    cfg = builtin_config("I")
    frames, truth = simulate_sequence(cfg)
    checked = 0
    for frame in frames[::97]:
        for fobs in frame.features:
            u, v, depth = project_point(cfg.intrinsics, frame.camera_pose, truth.feature_points[fobs.feature_id])
            assert (u, v, depth) == (fobs.u, fobs.v, fobs.depth)
            checked += 1
    assert checked > 100


def test_detection_requires_visible_head():
    cfg = builtin_config("I")
    frames, truth = simulate_sequence(cfg)
    human = cfg.humans[0]
    checked = 0
    for frame in frames[::53]:
        (hx, hy) = truth.human_positions[frame.frame_index][0]
        head = (hx, hy, human.body_height)
        try:
            u, v, depth = project_point(cfg.intrinsics, frame.camera_pose, head)
            in_image = 0 <= u < cfg.intrinsics.image_width and 0 <= v < cfg.intrinsics.image_height
        except BehindCameraError:
            in_image = False
        visible = in_image and occlusion_test(
            frame.camera_pose, cfg.intrinsics.cam_height, head, cfg.obstacles, [], exclude_human=None
        )
        has_detection = any(d.agent_index == 0 for d in frame.detections)
        assert has_detection == visible
        if visible:
            det = next(d for d in frame.detections if d.agent_index == 0)
            assert det.y_min == pytest.approx(v)  # head row tops the box
            assert det.x_min < det.x_max and det.y_min < det.y_max
            checked += 1
    assert checked > 3


def test_partial_occlusion_clips_box_bottom():
    # human fully behind a 0.7 m slab: only the upper body is visible
    slab = ObstacleBox((1.0, 3.0), (0.05, 2.0), 0.7)
    human = AgentTrajectory(
        "human", ((0.0, (2.6, 3.0, 0.0)), (1.0, (2.6, 3.1, 0.0))), body_height=1.7
    )
    camera_fixed = AgentTrajectory("robot", ((0.0, (0.25, 3.0, 0.0)), (1.0, (0.25, 3.0, 0.0))))
    scene = _minimal_scene([slab], [human])
    scene.robot = camera_fixed
    frames, _ = simulate_sequence(scene)
    det = frames[0].detections[0]
    unobstructed = _minimal_scene([], [human])
    unobstructed.robot = camera_fixed
    frames_clear, _ = simulate_sequence(unobstructed)
    det_clear = frames_clear[0].detections[0]
    assert det.y_min == pytest.approx(det_clear.y_min)  # the head row is unchanged
    assert det.y_max < det_clear.y_max  # the feet are cut off by the slab


def test_feature_sampling_deterministic_and_spaced():
    cfg = builtin_config("I")
    pts = sample_feature_points(cfg)
    assert pts == sample_feature_points(cfg)
    heights = {round(p[2], 6) for p in pts.values()}
    assert heights == {0.1, 0.7}
    # one table: perimeter 6.2 m at 0.1 m spacing, two heights
    per_table = 2 * (6 + 25) * 2
    assert len(pts) == per_table * len(cfg.obstacles)


def test_odometry_composes_to_pose():
    from travmap.posegraph import Pose2, se2_compose

    frames, truth = simulate_sequence(builtin_config("I"))
    pose = Pose2(*frames[0].camera_pose)
    for frame in frames[1:]:
        pose = se2_compose(pose, Pose2(*frame.odometry))
    assert pose.x == pytest.approx(truth.camera_poses[-1][0], abs=1e-9)
    assert pose.y == pytest.approx(truth.camera_poses[-1][1], abs=1e-9)


def test_odometry_noise_seeded():
    import dataclasses

    cfg = dataclasses.replace(builtin_config("I"), odom_sigma_trans=0.01, odom_sigma_rot=0.001)
    a, _ = simulate_sequence(cfg)
    b, _ = simulate_sequence(cfg)
    assert a == b
    c, _ = simulate_sequence(dataclasses.replace(cfg, rng_seed=5))
    assert a != c
