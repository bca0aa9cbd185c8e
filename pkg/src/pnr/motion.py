"""Fixed-fps 22-joint motion sequences and the rigid-normalization,
resampling and head-frame operations defined over them.

A sequence stores joint positions as one (N, 22, 3) array; frame i lives
at time i / fps. Ground-truth sequences may carry a per-frame world gaze
direction used by the priming metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePose
from .geometry import RigidTransform
from .skeleton import (
    HEAD,
    L_HIP,
    L_SHOULDER,
    L_WRIST,
    N_JOINTS,
    NECK,
    PELVIS,
    R_HIP,
    R_SHOULDER,
    R_WRIST,
)

UP = np.array([0.0, 1.0, 0.0])

_DEGENERATE_TOL = 1e-9


@dataclass(frozen=True)
class MotionFrame:
    t: float
    joints: np.ndarray
    gaze_world: np.ndarray | None = None


@dataclass(frozen=True)
class MotionSequence:
    fps: float
    joints: np.ndarray
    gaze: np.ndarray | None = field(default=None)

    def __post_init__(self):
        j = np.asarray(self.joints, dtype=np.float64)
        if j.ndim != 3 or j.shape[1:] != (N_JOINTS, 3):
            raise ValueError(f"joints must be (N, {N_JOINTS}, 3), got {j.shape}")
        if j.shape[0] < 2:
            raise ValueError("a motion needs at least 2 frames")
        if not np.all(np.isfinite(j)):
            raise ValueError("non-finite joint positions")
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        object.__setattr__(self, "joints", j)
        if self.gaze is not None:
            g = np.asarray(self.gaze, dtype=np.float64)
            if g.shape != (j.shape[0], 3):
                raise ValueError("gaze must be (N, 3) matching the frames")
            object.__setattr__(self, "gaze", g)

    @property
    def n_frames(self) -> int:
        return self.joints.shape[0]

    @property
    def duration(self) -> float:
        return (self.n_frames - 1) / self.fps

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_frames) / self.fps

    def frame(self, i: int) -> MotionFrame:
        gaze = None if self.gaze is None else self.gaze[i]
        return MotionFrame(i / self.fps, self.joints[i], gaze)

    def transformed(self, t: RigidTransform) -> "MotionSequence":
        gaze = None if self.gaze is None else t.apply_dirs(self.gaze)
        return MotionSequence(self.fps, t.apply_points(self.joints), gaze)


def resample(motion: MotionSequence, n: int) -> MotionSequence:
    """Uniform up-/down-sampling to exactly ``n`` frames.

    Joint positions are linearly interpolated at uniform parameters over
    [first, last]; endpoints are preserved exactly and resampling at the
    current frame count is the identity. The gaze channel, being a held
    directional signal, takes the nearest source frame instead of a lerp.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    src = motion.n_frames
    pos = np.linspace(0.0, src - 1, n)
    i0 = np.minimum(np.floor(pos).astype(int), src - 2)
    w = (pos - i0)[:, None, None]
    joints = (1.0 - w) * motion.joints[i0] + w * motion.joints[i0 + 1]
    gaze = None
    if motion.gaze is not None:
        gaze = motion.gaze[np.round(pos).astype(int)]
    fps = motion.fps * (n - 1) / (src - 1)
    return MotionSequence(fps, joints, gaze)


def _across_vectors(joints: np.ndarray) -> np.ndarray:
    """Left-to-right body axis per frame from hips and shoulders, (N, 3)."""
    return (joints[:, L_HIP] - joints[:, R_HIP]) + (
        joints[:, L_SHOULDER] - joints[:, R_SHOULDER]
    )


def heading_angles(joints: np.ndarray) -> np.ndarray:
    """Per-frame yaw of the body's facing direction, (N,).

    Zero means facing +z; the angle grows toward +x (rotation about +y).
    Raises DegeneratePose when hips and shoulders give no horizontal axis.
    """
    across = _across_vectors(joints)
    fx, fz = -across[:, 2], across[:, 0]
    norm = np.hypot(fx, fz)
    if np.any(norm < _DEGENERATE_TOL):
        raise DegeneratePose("body axis is parallel to the up axis")
    return np.arctan2(fx, fz)


def yaw_rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def canonicalize(motion: MotionSequence) -> tuple[MotionSequence, RigidTransform]:
    """Rigidly normalize so frame 0 has the pelvis over the ground origin
    and faces +z. Returns the applied transform so callers can invert it
    or drag other scene geometry into the same frame."""
    psi0 = float(heading_angles(motion.joints[:1])[0])
    r = yaw_rotation(-psi0)
    p0 = motion.joints[0, PELVIS]
    ground = np.array([p0[0], 0.0, p0[2]])
    t = RigidTransform(r, -(r @ ground))
    return motion.transformed(t), t


def head_forward(pose: np.ndarray) -> np.ndarray:
    """Forward direction of the head frame built from joint positions:
    up from neck->head, across from the shoulders, forward their cross."""
    pose = np.asarray(pose, dtype=np.float64)
    up_h = pose[HEAD] - pose[NECK]
    up_n = np.linalg.norm(up_h)
    across = pose[L_SHOULDER] - pose[R_SHOULDER]
    across_n = np.linalg.norm(across)
    if up_n < _DEGENERATE_TOL or across_n < _DEGENERATE_TOL:
        raise DegeneratePose("head or shoulder axis is undefined")
    fwd = np.cross(across / across_n, up_h / up_n)
    n = np.linalg.norm(fwd)
    if n < _DEGENERATE_TOL:
        raise DegeneratePose("shoulder axis is parallel to the head axis")
    return fwd / n


def head_forward_batch(joints: np.ndarray) -> np.ndarray:
    """head_forward over (N, 22, 3), returning (N, 3)."""
    up_h = joints[:, HEAD] - joints[:, NECK]
    across = joints[:, L_SHOULDER] - joints[:, R_SHOULDER]
    fwd = np.cross(across, up_h)
    n = np.linalg.norm(fwd, axis=1)
    if np.any(n < _DEGENERATE_TOL):
        raise DegeneratePose("shoulder axis is parallel to the head axis")
    return fwd / n[:, None]


def body_movement(motion: MotionSequence) -> float:
    """Maximum pelvis displacement from the first frame, meters."""
    d = motion.joints[:, PELVIS] - motion.joints[0, PELVIS]
    return float(np.linalg.norm(d, axis=1).max())


def hand_movement(motion: MotionSequence) -> float:
    """Maximum wrist displacement from the first frame, either side."""
    best = 0.0
    for w in (L_WRIST, R_WRIST):
        d = motion.joints[:, w] - motion.joints[0, w]
        best = max(best, float(np.linalg.norm(d, axis=1).max()))
    return best
