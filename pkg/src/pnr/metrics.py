"""The six evaluation metrics over (predicted, ground-truth) sequence
pairs, plus the prime-success threshold sweep.

All thresholds are inclusive on the success side (<= for prime and reach)
and on the error side (>= for the location flag), matching the reported
definitions; angles are radians internally and degrees only at the CLI
boundary. No root alignment is applied anywhere: errors are world-frame
because generation is conditioned on a world-frame initial state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curation import PnRSequence
from .errors import EmptyCorpus, MissingGaze
from .geometry import as_vec3
from .motion import MotionSequence, head_forward_batch, resample
from .skeleton import L_ANKLE, L_FOOT, L_WRIST, PELVIS, R_ANKLE, R_FOOT, R_WRIST

DEFAULT_THETA_DEG = 16.0
DEFAULT_SIGMA = 0.2  # s
DEFAULT_REACH_RADIUS = 0.10  # m
DEFAULT_LOCATION_THRESHOLD = 0.50  # m
DEFAULT_SKATE_SPEED = 0.5  # m/s
DEFAULT_SKATE_HEIGHT = 0.05  # m
DEFAULT_N_FRAMES = 150

FOOT_JOINT_CHOICES = {
    "toes": ((L_FOOT,), (R_FOOT,)),
    "ankles": ((L_ANKLE,), (R_ANKLE,)),
    "both": ((L_FOOT, L_ANKLE), (R_FOOT, R_ANKLE)),
}


@dataclass(frozen=True)
class MetricsConfig:
    theta_deg: float = DEFAULT_THETA_DEG
    sigma: float = DEFAULT_SIGMA
    reach_radius: float = DEFAULT_REACH_RADIUS
    location_threshold: float = DEFAULT_LOCATION_THRESHOLD
    skate_speed: float = DEFAULT_SKATE_SPEED
    skate_height: float = DEFAULT_SKATE_HEIGHT
    n_frames: int = DEFAULT_N_FRAMES
    foot_joints: str = "toes"

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.foot_joints not in FOOT_JOINT_CHOICES:
            raise ValueError(f"foot_joints must be one of {sorted(FOOT_JOINT_CHOICES)}")

    @property
    def theta_rad(self) -> float:
        return math.radians(self.theta_deg)

    def to_dict(self) -> dict:
        return {
            "theta_deg": self.theta_deg,
            "sigma_s": self.sigma,
            "reach_radius_m": self.reach_radius,
            "location_threshold_m": self.location_threshold,
            "skate_speed_m_per_s": self.skate_speed,
            "skate_height_m": self.skate_height,
            "n_frames": self.n_frames,
            "foot_joints": self.foot_joints,
        }


@dataclass(frozen=True)
class EvalPair:
    """A predicted motion against its ground truth, on a shared frame
    count and fps. prime_gaze is the GT gaze at the prime time, captured
    before any resampling so the reference direction cannot be blurred."""

    id: str
    predicted: MotionSequence
    ground_truth: MotionSequence
    prime_frame_index: int
    goal_location: np.ndarray
    prime_gaze: np.ndarray

    def __post_init__(self):
        if self.predicted.n_frames != self.ground_truth.n_frames:
            raise ValueError("predicted and ground truth must share frame counts")
        if not math.isclose(self.predicted.fps, self.ground_truth.fps, rel_tol=1e-9):
            raise ValueError("predicted and ground truth must share fps")
        if not 0 <= self.prime_frame_index < self.predicted.n_frames:
            raise ValueError("prime frame index out of range")
        object.__setattr__(self, "goal_location", as_vec3(self.goal_location))
        object.__setattr__(self, "prime_gaze", as_vec3(self.prime_gaze))

    @staticmethod
    def from_sequences(predicted: MotionSequence, gt: PnRSequence, n: int | None = None) -> "EvalPair":
        """Pair a prediction with a curated sequence, resampling the GT to
        n frames (default: the prediction's frame count). The prime gaze
        is read from the unresampled GT at its own prime frame."""
        if gt.motion.gaze is None:
            raise MissingGaze(f"{gt.id}: ground truth carries no gaze")
        n = n if n is not None else predicted.n_frames
        gaze_at_prime = gt.motion.gaze[gt.prime_frame_index]
        if not np.all(np.isfinite(gaze_at_prime)):
            raise MissingGaze(f"{gt.id}: gaze missing at the prime frame")
        resampled = resample(gt.motion, n)
        scale = (n - 1) / (gt.motion.n_frames - 1)
        prime_idx = int(round(gt.prime_frame_index * scale))
        if predicted.n_frames != n:
            raise ValueError("prediction frame count must equal n")
        return EvalPair(
            id=gt.id,
            predicted=predicted,
            ground_truth=resampled,
            prime_frame_index=prime_idx,
            goal_location=gt.goal_location,
            prime_gaze=gaze_at_prime / np.linalg.norm(gaze_at_prime),
        )


def _window_indices(pair: EvalPair, sigma: float) -> np.ndarray:
    half = int(round(sigma * pair.predicted.fps))
    lo = max(0, pair.prime_frame_index - half)
    hi = min(pair.predicted.n_frames - 1, pair.prime_frame_index + half)
    return np.arange(lo, hi + 1)


def prime_window_errors(pair: EvalPair, sigma: float) -> np.ndarray:
    """Angular error between the GT prime gaze and the predicted head
    forward, per frame of the +/- sigma window."""
    idx = _window_indices(pair, sigma)
    forwards = head_forward_batch(pair.predicted.joints[idx])
    dots = np.clip(forwards @ pair.prime_gaze, -1.0, 1.0)
    return np.arccos(dots)


def prime_success(pair: EvalPair, theta_deg: float = DEFAULT_THETA_DEG,
                  sigma: float = DEFAULT_SIGMA) -> bool:
    """Minimum angular error over the window is within theta."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    errors = prime_window_errors(pair, sigma)
    return bool(errors.min() <= math.radians(theta_deg))


def reach_success(pair: EvalPair, radius: float = DEFAULT_REACH_RADIUS) -> bool:
    """Either predicted wrist within radius of the goal at the final frame."""
    final = pair.predicted.joints[-1]
    d = min(
        float(np.linalg.norm(final[L_WRIST] - pair.goal_location)),
        float(np.linalg.norm(final[R_WRIST] - pair.goal_location)),
    )
    return d <= radius


def location_error_flag(pair: EvalPair,
                        threshold: float = DEFAULT_LOCATION_THRESHOLD) -> bool:
    """Final pelvis farther than threshold from the GT final pelvis."""
    d = float(
        np.linalg.norm(
            pair.predicted.joints[-1, PELVIS] - pair.ground_truth.joints[-1, PELVIS]
        )
    )
    return d >= threshold


def goal_mpjpe(pair: EvalPair) -> float:
    """Mean per-joint error at the final frame, meters."""
    d = np.linalg.norm(pair.predicted.joints[-1] - pair.ground_truth.joints[-1], axis=1)
    return float(d.mean())


def mpjpe(pair: EvalPair) -> float:
    """Mean per-joint error over all frames, meters."""
    d = np.linalg.norm(pair.predicted.joints - pair.ground_truth.joints, axis=2)
    return float(d.mean())


def foot_skating(motion: MotionSequence,
                 speed_threshold: float = DEFAULT_SKATE_SPEED,
                 height_threshold: float = DEFAULT_SKATE_HEIGHT,
                 foot_joints: str = "toes") -> float:
    """Fraction of frame steps where a grounded foot slides.

    A step from frame i-1 to i skates when, for either side, some tracked
    foot joint moves horizontally faster than speed_threshold while that
    joint is below height_threshold in both frames."""
    left, right = FOOT_JOINT_CHOICES[foot_joints]
    joints = motion.joints
    skate = np.zeros(joints.shape[0] - 1, dtype=bool)
    for side in (left, right):
        for j in side:
            track = joints[:, j]
            horiz = track[1:, [0, 2]] - track[:-1, [0, 2]]
            speed = np.linalg.norm(horiz, axis=1) * motion.fps
            grounded = (track[1:, 1] < height_threshold) & (track[:-1, 1] < height_threshold)
            skate |= grounded & (speed > speed_threshold)
    return float(skate.sum() / len(skate))


@dataclass(frozen=True)
class PairOutcome:
    id: str
    prime_success: bool
    reach_success: bool
    location_error: bool
    goal_mpjpe: float
    mpjpe: float
    foot_skating: float

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "prime_success": self.prime_success,
            "reach_success": self.reach_success,
            "location_error": self.location_error,
            "goal_mpjpe": self.goal_mpjpe,
            "mpjpe": self.mpjpe,
            "foot_skating": self.foot_skating,
        }


@dataclass(frozen=True)
class MetricsReport:
    prime_success: float  # percent
    reach_success: float  # percent
    location_error_rate: float  # percent
    goal_mpjpe: float  # meters
    mpjpe: float  # meters
    foot_skating: float  # fraction
    n: int
    config: MetricsConfig
    per_pair: tuple = field(default=())

    def to_dict(self) -> dict:
        return {
            "prime_success": self.prime_success,
            "reach_success": self.reach_success,
            "location_error_rate": self.location_error_rate,
            "goal_mpjpe": self.goal_mpjpe,
            "mpjpe": self.mpjpe,
            "foot_skating": self.foot_skating,
            "n": self.n,
            "config": self.config.to_dict(),
            "per_sequence": [p.to_dict() for p in self.per_pair],
        }


def evaluate_pair(pair: EvalPair, config: MetricsConfig = MetricsConfig()) -> PairOutcome:
    return PairOutcome(
        id=pair.id,
        prime_success=prime_success(pair, config.theta_deg, config.sigma),
        reach_success=reach_success(pair, config.reach_radius),
        location_error=location_error_flag(pair, config.location_threshold),
        goal_mpjpe=goal_mpjpe(pair),
        mpjpe=mpjpe(pair),
        foot_skating=foot_skating(
            pair.predicted, config.skate_speed, config.skate_height, config.foot_joints
        ),
    )


def evaluate(pairs, config: MetricsConfig = MetricsConfig()) -> MetricsReport:
    """All six metrics over a corpus of pairs; success metrics are
    percentages of the pair count."""
    pairs = list(pairs)
    if not pairs:
        raise EmptyCorpus("evaluate over zero pairs")
    outcomes = [evaluate_pair(p, config) for p in pairs]
    n = len(outcomes)
    return MetricsReport(
        prime_success=100.0 * sum(o.prime_success for o in outcomes) / n,
        reach_success=100.0 * sum(o.reach_success for o in outcomes) / n,
        location_error_rate=100.0 * sum(o.location_error for o in outcomes) / n,
        goal_mpjpe=float(np.mean([o.goal_mpjpe for o in outcomes])),
        mpjpe=float(np.mean([o.mpjpe for o in outcomes])),
        foot_skating=float(np.mean([o.foot_skating for o in outcomes])),
        n=n,
        config=config,
        per_pair=tuple(outcomes),
    )


def prime_success_sweep(pairs, thetas_deg, sigmas) -> np.ndarray:
    """Prime-success percentage grid, shape (len(sigmas), len(thetas)).

    Per-frame angular errors are computed once per pair over the widest
    window, then each (theta, sigma) cell reads its sub-window minimum."""
    pairs = list(pairs)
    if not pairs:
        raise EmptyCorpus("sweep over zero pairs")
    thetas = np.asarray(list(thetas_deg), dtype=np.float64)
    sigmas = np.asarray(list(sigmas), dtype=np.float64)
    if np.any(sigmas < 0):
        raise ValueError("sigmas must be >= 0")
    grid = np.zeros((len(sigmas), len(thetas)))
    mins = np.zeros((len(pairs), len(sigmas)))
    for i, pair in enumerate(pairs):
        for k, sigma in enumerate(sigmas):
            mins[i, k] = prime_window_errors(pair, float(sigma)).min()
    theta_rad = np.radians(thetas)
    for k in range(len(sigmas)):
        grid[k] = 100.0 * np.mean(mins[:, k][:, None] <= theta_rad[None, :], axis=0)
    return grid
