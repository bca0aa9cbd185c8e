"""Synthetic scenarios with analytically planted prime times, a static
mean-pose baseline, and a procedural prime-then-reach synthesizer.

The scenario generator is the verification oracle for the whole pipeline:
it emits recordings where, by construction, the gaze ray first lands on
the target at exactly the planted prime time. Before that moment the gaze
is held on a decoy direction rotated far off the target, so its ray
passes nowhere near the box; from the prime time on it is aimed at the
box center (direct-hit scenarios) or swept exactly 3 cm over the box top
(near-miss scenarios, which only the proximity rule can prime).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .curation import InitialState, Recording
from .errors import EmptyCorpus, InfeasibleSpec, UnreachableGoal
from .gaze import GazeTrack, InteractionEvent, ObjectTarget
from .geometry import Aabb, as_vec3
from .motion import MotionSequence, heading_angles, yaw_rotation
from .skeleton import (
    DEFAULT_SKELETON,
    HEAD,
    L_ANKLE,
    L_FOOT,
    L_WRIST,
    N_JOINTS,
    NECK,
    R_ANKLE,
    R_FOOT,
    R_WRIST,
)

REST = DEFAULT_SKELETON.rest_pose()
REST_LOCAL = REST - REST[0]
ROOT_HEIGHT = REST[0, 1]
HEAD_LEN = float(np.linalg.norm(REST[HEAD] - REST[NECK]))

DIRECT_HIT = "direct_hit"
NEAR_MISS = "near_miss"

STAND_DISTANCE = 0.45  # m from the goal where the walk ends
NEAR_MISS_GAP = 0.03  # m planted over-the-top clearance
DECOY_ANGLE = math.radians(40.0)
STEP_PERIOD = 0.4  # s per gait step
STEP_LIFT = 0.07  # m swing-foot apex
FOOT_LATERAL = 0.09  # m stance width from the root line
TURN_TIME = 0.5  # s to rotate onto the walk heading
SETTLE_TIME = 0.4  # s between arriving and the interaction
REACH_TIME = 0.5  # s of wrist travel before the interaction


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int = 0
    duration: float = 8.0
    fps: float = 30.0
    n_objects: int = 3
    room: Aabb = field(default_factory=lambda: Aabb((-4.0, 0.0, -4.0), (4.0, 2.5, 4.0)))
    planted_prime_offset: float = 3.0  # t_e - t_p
    planted_event_kind: str = "pick"
    gaze_noise_std: float = 0.0  # radians
    walk_speed: float = 1.0  # m/s
    prime_mode: str = DIRECT_HIT
    min_goal_distance: float = 1.5
    max_goal_distance: float = 3.5

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if self.duration <= self.planted_prime_offset + 2.0:
            raise ValueError("duration must exceed planted_prime_offset + 2 s")
        if self.planted_event_kind not in ("pick", "put"):
            raise ValueError("planted_event_kind must be pick or put")
        if self.prime_mode not in (DIRECT_HIT, NEAR_MISS):
            raise ValueError("prime_mode must be direct_hit or near_miss")


@dataclass(frozen=True)
class PlantedEvent:
    t_p: float
    t_e: float
    kind: str
    object_id: str
    goal: np.ndarray
    prime_mode: str


@dataclass(frozen=True)
class GroundTruthLabels:
    recording_id: str
    events: list


def _smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def _shortest_turn(a, b):
    """Signed angle from heading a to heading b along the short way."""
    return (b - a + math.pi) % (2.0 * math.pi) - math.pi


def _pose_track(times, root_xz, headings, look_targets,
                wrist_side=None, wrist_goal=None, wrist_weights=None,
                feet=None):
    """Assemble (N, 22, 3) joints: the rigid rest body carried along the
    root path and yaw headings, with the head re-aimed at per-frame look
    targets, an optional wrist lerp onto a goal, and optional foot tracks
    from the gait generator."""
    n = len(times)
    joints = np.empty((n, N_JOINTS, 3))
    cos, sin = np.cos(headings), np.sin(headings)
    rot = np.zeros((n, 3, 3))
    rot[:, 0, 0], rot[:, 0, 2] = cos, sin
    rot[:, 1, 1] = 1.0
    rot[:, 2, 0], rot[:, 2, 2] = -sin, cos
    roots = np.stack([root_xz[:, 0], np.full(n, ROOT_HEIGHT), root_xz[:, 1]], axis=1)
    joints[:] = np.einsum("nij,kj->nki", rot, REST_LOCAL) + roots[:, None, :]

    # head: build the head axis so the derived forward hits the look target
    across = rot[:, :, 0]  # body +x in world
    neck = joints[:, NECK]
    f_raw = look_targets - neck
    f_perp = f_raw - np.sum(f_raw * across, axis=1, keepdims=True) * across
    norms = np.linalg.norm(f_perp, axis=1)
    ok = norms > 1e-6
    f_perp[ok] /= norms[ok, None]
    up_h = np.cross(f_perp, across)
    joints[ok, HEAD] = neck[ok] + HEAD_LEN * up_h[ok]

    if feet is not None:
        l_toe, r_toe = feet
        joints[:, L_FOOT] = l_toe
        joints[:, R_FOOT] = r_toe
        back = np.einsum("nij,j->ni", rot, np.array([0.0, 0.06, -0.13]))
        joints[:, L_ANKLE] = l_toe + back
        joints[:, R_ANKLE] = r_toe + back

    if wrist_side is not None:
        w = wrist_weights[:, None]
        joints[:, wrist_side] = (1.0 - w) * joints[:, wrist_side] + w * wrist_goal
    return joints


def _gait_tracks(times, root_xz, headings, walk_start, walk_end):
    """Alternating-step toe tracks (left, right), each (N, 3).

    The stance foot is pinned; the swing foot travels with smoothstep
    horizontal progress (zero speed at lift-off and touchdown) and a
    half-sine lift above the contact height, so grounded frames never
    slide.
    """
    n = len(times)
    lat = np.stack([np.cos(headings), -np.sin(headings)], axis=1) * FOOT_LATERAL
    toe_y = REST[L_FOOT, 1]
    fwd = np.stack([np.sin(headings), np.cos(headings)], axis=1) * 0.10

    tracks = {side: np.zeros((n, 3)) for side in ("l", "r")}
    plant = {
        "l": root_xz[0] + lat[0] + fwd[0],
        "r": root_xz[0] - lat[0] + fwd[0],
    }

    def set_frames(side, mask, xz, y=None):
        tracks[side][mask, 0] = xz[..., 0]
        tracks[side][mask, 2] = xz[..., 1]
        tracks[side][mask, 1] = toe_y if y is None else y

    before = times < walk_start
    for side in ("l", "r"):
        set_frames(side, before, plant[side][None, :])

    if walk_end > walk_start:
        t = walk_start
        k = 0
        while t < walk_end - 1e-9:
            t_next = min(t + STEP_PERIOD, walk_end)
            swing, stance = ("l", "r") if k % 2 == 0 else ("r", "l")
            mask = (times >= t) & (times < t_next)
            idx_land = min(np.searchsorted(times, t_next), n - 1)
            sign = 1.0 if swing == "l" else -1.0
            target = root_xz[idx_land] + sign * lat[idx_land] + fwd[idx_land]
            if mask.any():
                u = (times[mask] - t) / (t_next - t)
                s = _smoothstep(u)[:, None]
                xz = (1.0 - s) * plant[swing][None, :] + s * target[None, :]
                y = toe_y + STEP_LIFT * np.sin(np.pi * np.clip(u, 0, 1))
                set_frames(swing, mask, xz, y)
                set_frames(stance, mask, plant[stance][None, :])
            plant[swing] = target
            t = t_next
            k += 1

    after = times >= walk_end
    for side in ("l", "r"):
        set_frames(side, after, plant[side][None, :])
    return tracks["l"], tracks["r"]


def _root_profile(times, start_xz, stand_xz, walk_start, arrive):
    """Ease-in/ease-out straight-line root path between the two marks."""
    if arrive <= walk_start:
        u = np.where(times >= arrive, 1.0, 0.0)
    else:
        u = _smoothstep((times - walk_start) / (arrive - walk_start))
    return start_xz[None, :] + u[:, None] * (stand_xz - start_xz)[None, :]


def _heading_profile(times, psi0, psi1, turn_start, turn_end):
    dpsi = _shortest_turn(psi0, psi1)
    if turn_end <= turn_start:
        u = np.where(times >= turn_end, 1.0, 0.0)
    else:
        u = _smoothstep((times - turn_start) / (turn_end - turn_start))
    return psi0 + u * dpsi


def _random_box(rng, room, margin=0.4):
    half = rng.uniform(0.04, 0.12, size=3)
    lo = room.min + margin
    hi = room.max - margin
    center = rng.uniform(lo, hi)
    center[1] = rng.uniform(0.4, 1.4)
    return Aabb(center - half, center + half)


def generate_scenario(spec: ScenarioSpec) -> tuple[Recording, GroundTruthLabels]:
    """One recording with a single planted pick/put interaction.

    Guarantees, by construction: no gaze sample before the planted t_p
    primes the target (the decoy ray passes at least ~0.8 m from it);
    every sample in [t_p, t_e] primes it in the planted mode; the walk
    reaches a standing point by t_e - SETTLE_TIME and a wrist touches the
    goal at t_e. All times are on the frame grid, so prime-time recovery
    is exact."""
    rng = np.random.default_rng(spec.seed)
    fps = spec.fps
    n_frames = int(round(spec.duration * fps)) + 1
    times = np.arange(n_frames) / fps

    e_lo = math.ceil((spec.planted_prime_offset + 2.0) * fps)
    e_hi = n_frames - 2
    if e_hi < e_lo:
        raise InfeasibleSpec("duration leaves no room for the planted event")
    e_idx = int(rng.integers(e_lo, e_hi + 1))
    p_idx = e_idx - int(round(spec.planted_prime_offset * fps))
    t_e, t_p = times[e_idx], times[p_idx]

    walk_time = (t_e - SETTLE_TIME) - t_p
    d_max_feasible = STAND_DISTANCE + spec.walk_speed * max(walk_time, 0.0)
    d_lo = spec.min_goal_distance
    d_hi = min(spec.max_goal_distance, d_max_feasible)
    if d_hi < d_lo:
        raise InfeasibleSpec(
            f"walk speed {spec.walk_speed} m/s cannot cover "
            f"{d_lo:.2f} m within {walk_time:.2f} s"
        )

    cam_height = REST[HEAD, 1]
    room = spec.room
    for _ in range(200):
        box = _random_box(rng, room)
        if spec.prime_mode == NEAR_MISS:
            # pin the box so a horizontal ray at camera height clears the
            # top face by exactly NEAR_MISS_GAP
            half = box.half_extents
            cy = cam_height - half[1] - NEAR_MISS_GAP
            if cy - half[1] < 0.0:
                continue
            center = box.center
            center[1] = cy
            box = Aabb.from_center(center, half)
        theta = rng.uniform(0.0, 2.0 * math.pi)
        dist = rng.uniform(d_lo, d_hi)
        goal_xz = np.array([box.center[0], box.center[2]])
        start_xz = goal_xz - dist * np.array([math.sin(theta), math.cos(theta)])
        inside = (
            room.min[0] + 0.3 <= start_xz[0] <= room.max[0] - 0.3
            and room.min[2] + 0.3 <= start_xz[1] <= room.max[2] - 0.3
        )
        if inside:
            break
    else:
        raise InfeasibleSpec("could not place start and target inside the room")

    target = ObjectTarget("target", box=box)
    objects = {"target": target}
    for i in range(max(spec.n_objects - 1, 0)):
        objects[f"distractor{i:02d}"] = ObjectTarget(
            f"distractor{i:02d}", box=_random_box(rng, room)
        )

    stand_xz = goal_xz - STAND_DISTANCE * np.array([math.sin(theta), math.cos(theta)])
    psi_start = rng.uniform(0.0, 2.0 * math.pi)
    headings = _heading_profile(times, psi_start, theta, t_p - TURN_TIME, t_p)
    root_xz = _root_profile(times, start_xz, stand_xz, t_p, t_e - SETTLE_TIME)
    feet = _gait_tracks(times, root_xz, headings, t_p, t_e - SETTLE_TIME)

    goal = box.center.copy()
    if spec.prime_mode == NEAR_MISS:
        aim_point = box.center + np.array([0.0, box.half_extents[1] + NEAR_MISS_GAP, 0.0])
    else:
        aim_point = box.center

    # look targets: decoy before the prime, the aim point from it on
    decoy_yaw = DECOY_ANGLE * (1.0 if rng.random() < 0.5 else -1.0)
    look = np.tile(aim_point, (n_frames, 1))
    pre = times < t_p
    u0 = aim_point - np.array([start_xz[0], cam_height, start_xz[1]])
    decoy_dir = yaw_rotation(decoy_yaw) @ (u0 / np.linalg.norm(u0))
    look[pre] = np.array([start_xz[0], cam_height, start_xz[1]]) + 5.0 * decoy_dir

    stand_root = np.array([stand_xz[0], ROOT_HEIGHT, stand_xz[1]])
    stand_rot = yaw_rotation(theta)
    l_w = stand_rot @ REST_LOCAL[L_WRIST] + stand_root
    r_w = stand_rot @ REST_LOCAL[R_WRIST] + stand_root
    wrist_side = L_WRIST if np.linalg.norm(l_w - goal) <= np.linalg.norm(r_w - goal) else R_WRIST
    w = _smoothstep((times - (t_e - REACH_TIME)) / REACH_TIME)

    joints = _pose_track(times, root_xz, headings, look,
                         wrist_side=wrist_side, wrist_goal=goal,
                         wrist_weights=w, feet=feet)

    # gaze stream on the same grid; camera rides the head (at a fixed
    # height in near-miss mode so the over-the-top clearance is exact)
    cam_pos = joints[:, HEAD].copy()
    if spec.prime_mode == NEAR_MISS:
        cam_pos[:, 1] = cam_height
    dirs = aim_point[None, :] - cam_pos
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    pre_dirs = np.tile(decoy_dir, (pre.sum(), 1))
    dirs[pre] = pre_dirs
    if spec.gaze_noise_std > 0.0 and spec.prime_mode == DIRECT_HIT:
        dirs = _perturb_gaze(rng, dirs, cam_pos, box, pre, spec.gaze_noise_std)

    rotations = np.zeros((n_frames, 3, 3))
    cos, sin = np.cos(headings), np.sin(headings)
    rotations[:, 0, 0], rotations[:, 0, 2] = cos, sin
    rotations[:, 1, 1] = 1.0
    rotations[:, 2, 0], rotations[:, 2, 2] = -sin, cos
    points_cam = np.einsum("nji,nj->ni", rotations, dirs)  # R^T @ dir
    track = GazeTrack(times, points_cam, rotations, cam_pos)

    rec_id = f"synth-{spec.seed:08d}"
    event = InteractionEvent(spec.planted_event_kind, float(t_e), target)
    recording = Recording(
        id=rec_id,
        video_id=f"video-{spec.seed % 97:04d}",
        gaze=track,
        motion=MotionSequence(fps, joints),
        objects=objects,
        events=[event],
    )
    labels = GroundTruthLabels(
        rec_id,
        [PlantedEvent(float(t_p), float(t_e), spec.planted_event_kind,
                      "target", goal, spec.prime_mode)],
    )
    return recording, labels


def _perturb_gaze(rng, dirs, cam_pos, box, pre_mask, std):
    """Small random rotations of the post-prime gaze, clipped inside the
    box's inscribed-sphere cone so a planted hit stays a hit. Pre-prime
    decoy samples get at most 5 degrees, preserving the decoy clearance."""
    out = dirs.copy()
    min_half = float(box.half_extents.min())
    center = box.center
    for i in range(len(dirs)):
        if pre_mask[i]:
            limit = math.radians(5.0)
        else:
            dist = float(np.linalg.norm(center - cam_pos[i]))
            limit = 0.8 * math.asin(min(min_half / max(dist, min_half), 1.0))
        angle = float(np.clip(rng.normal(0.0, std), -limit, limit))
        axis = np.cross(out[i], rng.normal(size=3))
        norm = np.linalg.norm(axis)
        if norm < 1e-9:
            continue
        axis /= norm
        out[i] = (
            out[i] * math.cos(angle)
            + np.cross(axis, out[i]) * math.sin(angle)
        )
        out[i] /= np.linalg.norm(out[i])
    return out


def generate_corpus(base: ScenarioSpec, n_recordings: int, seed: int = 0,
                    mixed_modes: bool = False) -> list:
    """n independent scenarios with per-recording seeds derived from one
    corpus seed. Returns [(Recording, GroundTruthLabels), ...]."""
    child_seeds = np.random.SeedSequence(seed).generate_state(n_recordings)
    out = []
    for i in range(n_recordings):
        spec = replace(base, seed=int(child_seeds[i]))
        if mixed_modes and i % 4 == 3:
            spec = replace(spec, prime_mode=NEAR_MISS)
        out.append(generate_scenario(spec))
    return out


def static_baseline(train, n: int, fps: float = 30.0) -> MotionSequence:
    """Average full-body pose over every frame of the training sequences,
    replicated for n frames."""
    train = list(train)
    if not train:
        raise EmptyCorpus("static baseline needs a non-empty train set")
    total = np.zeros((N_JOINTS, 3))
    count = 0
    for seq in train:
        total += seq.motion.joints.sum(axis=0)
        count += seq.motion.n_frames
    mean_pose = total / count
    return MotionSequence(fps, np.tile(mean_pose, (n, 1, 1)))


def procedural_pnr(initial: InitialState, goal, event_kind: str, n: int,
                   fps: float, max_speed: float = 3.0) -> MotionSequence:
    """Deterministic kinematic stand-in for a learned generator.

    Turns the head onto the goal direction within the first fifth of the
    frames, eases the root to a standing point near the goal, walks with
    the alternating gait, and brings the nearer wrist onto the goal over
    the final 15% of frames."""
    goal = as_vec3(goal)
    if n < 2:
        raise ValueError("n must be >= 2")
    pose = initial.pose
    times = np.arange(n) / fps
    total = times[-1]

    psi0 = float(heading_angles(pose[None])[0])
    start_xz = np.array([pose[0, 0], pose[0, 2]])
    goal_xz = np.array([goal[0], goal[2]])
    to_goal = goal_xz - start_xz
    dist = float(np.linalg.norm(to_goal))
    if dist > STAND_DISTANCE:
        walk_dir = to_goal / dist
        stand_xz = goal_xz - STAND_DISTANCE * walk_dir
        theta = math.atan2(walk_dir[0], walk_dir[1])
    else:
        stand_xz = start_xz
        theta = math.atan2(to_goal[0], to_goal[1]) if dist > 1e-9 else psi0

    walk_start, arrive = 0.15 * total, 0.85 * total
    walk_dist = float(np.linalg.norm(stand_xz - start_xz))
    if walk_dist > 1e-9:
        needed = walk_dist / max(arrive - walk_start, 1e-9)
        if needed > max_speed:
            raise UnreachableGoal(
                f"goal needs {needed:.2f} m/s, above the {max_speed} m/s limit"
            )

    headings = _heading_profile(times, psi0, theta, 0.0, 0.2 * total)
    root_xz = _root_profile(times, start_xz, stand_xz, walk_start, arrive)
    feet = _gait_tracks(times, root_xz, headings, walk_start, arrive)
    look = np.tile(goal, (n, 1))

    stand_rot = yaw_rotation(theta)
    root_world = np.array([stand_xz[0], ROOT_HEIGHT, stand_xz[1]])
    l_w = stand_rot @ REST_LOCAL[L_WRIST] + root_world
    r_w = stand_rot @ REST_LOCAL[R_WRIST] + root_world
    wrist_side = L_WRIST if np.linalg.norm(l_w - goal) <= np.linalg.norm(r_w - goal) else R_WRIST
    w = _smoothstep((times - 0.85 * total) / max(0.15 * total, 1e-9))

    joints = _pose_track(times, root_xz, headings, look,
                         wrist_side=wrist_side, wrist_goal=goal,
                         wrist_weights=w, feet=feet)
    return MotionSequence(fps, joints)
