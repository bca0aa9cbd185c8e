"""World-frame gaze rays from eye-tracker samples, and prime-time
detection: the first moment in a window before a pick/put event where the
gaze ray lands on (or near-misses) the event's target.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateGaze, EmptyWindow
from .geometry import (
    Aabb,
    Ray,
    RigidTransform,
    as_vec3,
    near_miss,
    near_miss_batch,
    slab_intersect,
    slab_intersect_batch,
)

log = logging.getLogger(__name__)

DEFAULT_WINDOW = 10.0  # s
DEFAULT_TAU = 0.05  # m

DIRECT_HIT = "direct_hit"
NEAR_MISS = "near_miss"

_DEGENERATE_TOL = 1e-9


@dataclass(frozen=True)
class GazeSample:
    t: float
    gaze_point_cam: np.ndarray
    cam_pose: RigidTransform

    def __post_init__(self):
        object.__setattr__(self, "gaze_point_cam", as_vec3(self.gaze_point_cam))


@dataclass(frozen=True)
class GazeTrack:
    """Columnar storage of a gaze stream: one row per eye-tracker sample."""

    times: np.ndarray
    points_cam: np.ndarray
    rotations: np.ndarray
    translations: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        p = np.asarray(self.points_cam, dtype=np.float64)
        r = np.asarray(self.rotations, dtype=np.float64)
        tr = np.asarray(self.translations, dtype=np.float64)
        n = len(t)
        if p.shape != (n, 3) or r.shape != (n, 3, 3) or tr.shape != (n, 3):
            raise ValueError("gaze track arrays disagree on length")
        if n > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("gaze times must be strictly increasing")
        for name, arr in (("times", t), ("points_cam", p), ("rotations", r), ("translations", tr)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite values in {name}")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points_cam", p)
        object.__setattr__(self, "rotations", r)
        object.__setattr__(self, "translations", tr)

    def __len__(self):
        return len(self.times)

    @staticmethod
    def from_samples(samples) -> "GazeTrack":
        samples = list(samples)
        return GazeTrack(
            np.array([s.t for s in samples]),
            np.array([s.gaze_point_cam for s in samples]),
            np.array([s.cam_pose.rotation for s in samples]),
            np.array([s.cam_pose.translation for s in samples]),
        )

    def sample(self, i: int) -> GazeSample:
        return GazeSample(
            float(self.times[i]),
            self.points_cam[i],
            RigidTransform(self.rotations[i], self.translations[i]),
        )

    def world_rays(self) -> tuple[np.ndarray, np.ndarray]:
        """Ray origins and unit directions for every sample, ((N,3), (N,3)).

        Cached after the first call; treat the arrays as read-only. Raises
        DegenerateGaze if any sample's gaze point collapses onto the
        camera origin.
        """
        cached = getattr(self, "_rays", None)
        if cached is not None:
            return cached
        dirs = np.einsum("nij,nj->ni", self.rotations, self.points_cam)
        norms = np.linalg.norm(dirs, axis=1)
        if np.any(norms < _DEGENERATE_TOL):
            bad = int(np.argmin(norms))
            raise DegenerateGaze(f"gaze sample {bad} at t={self.times[bad]:.6f}")
        rays = (self.translations, dirs / norms[:, None])
        object.__setattr__(self, "_rays", rays)
        return rays


@dataclass(frozen=True)
class ObjectTarget:
    """A priming target: a box, or a bare 3-D point treated as a
    zero-extent box (which only the near-miss path can prime)."""

    id: str
    box: Aabb | None = None
    point: np.ndarray | None = None

    def __post_init__(self):
        if (self.box is None) == (self.point is None):
            raise ValueError("target needs exactly one of box or point")
        if self.point is not None:
            object.__setattr__(self, "point", as_vec3(self.point))

    def as_box(self) -> Aabb:
        if self.box is not None:
            return self.box
        return Aabb(self.point, self.point)

    @property
    def location(self) -> np.ndarray:
        return self.as_box().center


@dataclass(frozen=True)
class InteractionEvent:
    kind: str  # "pick" | "put"
    t_e: float
    target: ObjectTarget
    low_confidence: bool = False

    def __post_init__(self):
        if self.kind not in ("pick", "put"):
            raise ValueError(f"unknown event kind {self.kind!r}")


@dataclass(frozen=True)
class PrimedEvent:
    event: InteractionEvent
    t_p: float
    prime_mode: str = field(default=DIRECT_HIT)


def gaze_ray(sample: GazeSample) -> Ray:
    """World gaze ray of one sample: from the camera position through the
    world-transformed gaze point."""
    d = sample.cam_pose.rotation @ sample.gaze_point_cam
    n = float(np.linalg.norm(d))
    if n < _DEGENERATE_TOL:
        raise DegenerateGaze(f"gaze point coincides with camera origin at t={sample.t}")
    return Ray(sample.cam_pose.translation, d / n)


def target_primed(ray: Ray, target: ObjectTarget, tau: float = DEFAULT_TAU) -> str | None:
    """Prime mode of a single ray against a target, or None.

    Direct hit is checked first; the near-miss rule is the fallback.
    """
    box = target.as_box()
    if slab_intersect(ray, box).hit:
        return DIRECT_HIT
    if near_miss(ray, box, tau).primed:
        return NEAR_MISS
    return None


def _as_track(gaze) -> GazeTrack:
    if isinstance(gaze, GazeTrack):
        return gaze
    return GazeTrack.from_samples(gaze)


def find_prime_time(
    gaze,
    event: InteractionEvent,
    w: float = DEFAULT_WINDOW,
    tau: float = DEFAULT_TAU,
) -> PrimedEvent | None:
    """Earliest sample in [t_e - w, t_e] whose gaze ray primes the target.

    Prime times are quantized to sample timestamps. Returns None when no
    sample in the window primes; raises EmptyWindow when the window holds
    no samples at all (stream/event misalignment).
    """
    track = _as_track(gaze)
    lo, hi = event.t_e - w, event.t_e
    idx = np.nonzero((track.times >= lo) & (track.times <= hi))[0]
    if idx.size == 0:
        raise EmptyWindow(f"no gaze samples in [{lo:.3f}, {hi:.3f}]")
    origins, dirs = track.world_rays()
    origins, dirs = origins[idx], dirs[idx]
    box = event.target.as_box()
    hit, _, _ = slab_intersect_batch(origins, dirs, box.min, box.max)
    primed = hit.copy()
    if not hit.all():
        nm, _, _ = near_miss_batch(origins[~hit], dirs[~hit], box.min, box.max, tau)
        primed[~hit] = nm
    where = np.nonzero(primed)[0]
    if where.size == 0:
        return None
    first = int(where[0])
    mode = DIRECT_HIT if hit[first] else NEAR_MISS
    return PrimedEvent(event, float(track.times[idx[first]]), mode)


def prime_events(
    gaze,
    events,
    w: float = DEFAULT_WINDOW,
    tau: float = DEFAULT_TAU,
) -> list[PrimedEvent]:
    """find_prime_time over a list of events, dropping unprimed ones and
    skipping (with a warning) events whose window holds no samples."""
    track = _as_track(gaze)
    out = []
    for event in events:
        try:
            primed = find_prime_time(track, event, w, tau)
        except EmptyWindow as exc:
            log.warning("skipping %s event at t_e=%.3f: %s", event.kind, event.t_e, exc)
            continue
        if primed is not None:
            out.append(primed)
    return out
