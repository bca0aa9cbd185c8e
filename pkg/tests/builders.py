"""Shared constructors for synthetic test motions."""

import numpy as np

from pnr.motion import MotionSequence, canonicalize, yaw_rotation
from pnr.skeleton import DEFAULT_SKELETON, N_JOINTS

REST = DEFAULT_SKELETON.rest_pose()
REST_LOCAL = REST - REST[0]


def standing_motion(n=30, fps=30.0, offset=(0.0, 0.0, 0.0)):
    joints = np.tile(REST + np.asarray(offset), (n, 1, 1))
    return MotionSequence(fps, joints)


def posed_frames(roots, headings):
    """Rigid rest body placed at per-frame root positions and yaw headings."""
    n = len(roots)
    joints = np.zeros((n, N_JOINTS, 3))
    for i in range(n):
        r = yaw_rotation(headings[i])
        joints[i] = REST_LOCAL @ r.T + roots[i]
    return joints


def glide_motion(speed=1.0, n=30, fps=30.0, heading=0.0):
    """Root translating at constant speed along its facing direction."""
    d = np.array([np.sin(heading), 0.0, np.cos(heading)])
    t = np.arange(n) / fps
    roots = REST[0] + t[:, None] * d * speed
    return MotionSequence(fps, posed_frames(roots, np.full(n, heading)))


def turning_motion(omega=0.5, n=60, fps=30.0):
    """Root spinning in place at a constant yaw rate (rad/s)."""
    headings = omega * np.arange(n) / fps
    roots = np.tile(REST[0], (n, 1))
    return MotionSequence(fps, posed_frames(roots, headings))


def random_smooth_motion(rng, n=150, fps=30.0):
    """Smooth wandering walk with arm and head micro-motion, canonicalized."""
    t = np.linspace(0.0, 1.0, n)

    def smooth(scale, k_max=3):
        out = np.zeros(n)
        for k in range(1, k_max + 1):
            out += rng.normal(0, scale / k) * np.sin(
                2 * np.pi * k * t + rng.uniform(0, 2 * np.pi)
            )
        return out

    roots = np.stack(
        [smooth(1.0), REST[0, 1] + smooth(0.03), smooth(1.0)], axis=1
    )
    headings = smooth(0.8)
    joints = posed_frames(roots, headings)
    # limb micro-motion that leaves hips and shoulders rigid
    for j in (15, 18, 19, 20, 21):
        for axis in range(3):
            joints[:, j, axis] += smooth(0.04)
    motion = MotionSequence(fps, joints)
    return canonicalize(motion)[0]
