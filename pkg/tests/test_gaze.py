import math

import numpy as np
import pytest

from pnr.errors import DegenerateGaze, EmptyWindow
from pnr.gaze import (
    DIRECT_HIT,
    NEAR_MISS,
    GazeSample,
    GazeTrack,
    InteractionEvent,
    ObjectTarget,
    find_prime_time,
    gaze_ray,
    prime_events,
    target_primed,
)
from pnr.geometry import Aabb, Ray, RigidTransform, unit, vec3


def identity_sample(t, point):
    return GazeSample(t, vec3(*point), RigidTransform.identity())


class TestGazeRay:
    def test_identity_pose(self):
        r = gaze_ray(identity_sample(0.0, (0, 0, 1)))
        assert np.allclose(r.origin, 0.0)
        assert np.allclose(r.dir, [0, 0, 1])

    def test_translation_cancels(self):
        pose = RigidTransform.from_translation(vec3(1, 1, 1))
        r = gaze_ray(GazeSample(0.0, vec3(0, 0, 2), pose))
        assert np.allclose(r.origin, [1, 1, 1])
        assert np.allclose(r.dir, [0, 0, 1])

    def test_rotated_frame(self):
        pose = RigidTransform.about_axis(vec3(0, 1, 0), math.pi / 2)
        r = gaze_ray(GazeSample(0.0, vec3(0, 0, 1), pose))
        assert np.allclose(r.dir, [1, 0, 0], atol=1e-12)

    def test_degenerate_sample_raises(self):
        with pytest.raises(DegenerateGaze):
            gaze_ray(identity_sample(0.0, (0, 0, 0)))

    def test_scale_invariance_of_direction(self):
        a = gaze_ray(identity_sample(0.0, (0, 0, 0.5)))
        b = gaze_ray(identity_sample(0.0, (0, 0, 7.0)))
        assert np.allclose(a.dir, b.dir)


class TestTargetPrimed:
    BOX = ObjectTarget("box", box=Aabb(vec3(2, -0.5, -0.5), vec3(3, 0.5, 0.5)))
    POINT = ObjectTarget("pt", point=vec3(5, 0, 0))

    def ray_towards(self, offset_y):
        return Ray(vec3(0, offset_y, 0), unit(vec3(1, 0, 0)))

    def test_center_ray_direct_hit(self):
        assert target_primed(self.ray_towards(0.0), self.BOX) == DIRECT_HIT

    def test_point_target_within_tau(self):
        # derived: perpendicular distance from the ray to the point is the
        # ray's y offset, so 3 cm vs tau=5 cm primes
        assert target_primed(self.ray_towards(0.03), self.POINT, tau=0.05) == NEAR_MISS

    def test_point_target_beyond_tau(self):
        assert target_primed(self.ray_towards(0.08), self.POINT, tau=0.05) is None

    def test_point_target_never_direct(self):
        through = Ray(vec3(0, 0, 0), unit(vec3(1, 0, 0)))
        assert target_primed(through, self.POINT, tau=0.05) == NEAR_MISS


def straight_track(times, direction=(0, 0, 1)):
    n = len(times)
    return GazeTrack(
        np.asarray(times, dtype=float),
        np.tile(np.asarray(direction, dtype=float), (n, 1)),
        np.tile(np.eye(3), (n, 1, 1)),
        np.zeros((n, 3)),
    )


def sweeping_track(times, on_from, target_dir, off_dir=(0, 0, -1)):
    """Gaze that flips from off_dir onto target_dir at time on_from."""
    pts = np.array([target_dir if t >= on_from else off_dir for t in times], dtype=float)
    n = len(times)
    return GazeTrack(
        np.asarray(times, dtype=float),
        pts,
        np.tile(np.eye(3), (n, 1, 1)),
        np.zeros((n, 3)),
    )


class TestFindPrimeTime:
    TARGET = ObjectTarget("t", box=Aabb.from_center(vec3(0, 0, 5), vec3(0.2, 0.2, 0.2)))

    def event(self, t_e=10.0):
        return InteractionEvent("pick", t_e, self.TARGET)

    def test_first_intersection_wins(self):
        times = np.arange(0.0, 10.5, 0.5)
        track = sweeping_track(times, on_from=7.0, target_dir=(0, 0, 1))
        primed = find_prime_time(track, self.event(), w=10.0)
        assert primed is not None
        assert primed.t_p == 7.0
        assert primed.prime_mode == DIRECT_HIT

    def test_no_intersection_returns_none(self):
        times = np.arange(0.0, 10.5, 0.5)
        track = straight_track(times, direction=(0, 0, -1))
        assert find_prime_time(track, self.event(), w=10.0) is None

    def test_intersection_after_event_does_not_count(self):
        times = np.arange(0.0, 14.0, 0.5)
        track = sweeping_track(times, on_from=12.0, target_dir=(0, 0, 1))
        assert find_prime_time(track, self.event(t_e=10.0), w=10.0) is None

    def test_window_start_boundary_inclusive(self):
        times = np.arange(0.0, 10.5, 0.5)
        track = sweeping_track(times, on_from=0.0, target_dir=(0, 0, 1))
        primed = find_prime_time(track, self.event(t_e=10.0), w=10.0)
        assert primed.t_p == 0.0

    def test_empty_window_raises(self):
        track = straight_track([20.0, 21.0])
        with pytest.raises(EmptyWindow):
            find_prime_time(track, self.event(t_e=10.0), w=5.0)

    def test_prime_time_is_minimal(self):
        # exhaustive re-scan: no earlier sample primes
        rng = np.random.default_rng(0)
        for _ in range(25):
            on_from = float(rng.integers(2, 18)) * 0.5
            times = np.arange(0.0, 10.5, 0.5)
            track = sweeping_track(times, on_from=on_from, target_dir=(0, 0, 1))
            ev = self.event()
            primed = find_prime_time(track, ev, w=10.0)
            if primed is None:
                assert on_from > 10.0
                continue
            for i in range(len(track)):
                t = float(track.times[i])
                if ev.t_e - 10.0 <= t < primed.t_p:
                    ray = gaze_ray(track.sample(i))
                    assert target_primed(ray, ev.target) is None

    def test_shrinking_window_never_earlier(self):
        times = np.arange(0.0, 10.5, 0.5)
        track = sweeping_track(times, on_from=4.0, target_dir=(0, 0, 1))
        full = find_prime_time(track, self.event(), w=10.0)
        for w in (8.0, 6.0, 4.0, 2.0):
            smaller = find_prime_time(track, self.event(), w=w)
            if smaller is not None:
                assert smaller.t_p >= full.t_p

    def test_scene_rigid_transform_preserves_prime_time(self):
        # rotate the whole scene 90 degrees about y: axis-aligned, so the
        # box maps to another box
        times = np.arange(0.0, 10.5, 0.5)
        track = sweeping_track(times, on_from=6.0, target_dir=(0, 0, 1))
        rig = RigidTransform.about_axis(vec3(0, 1, 0), math.pi / 2, translation=vec3(1, 2, 3))
        rot_track = GazeTrack(
            track.times,
            track.points_cam,
            np.einsum("ij,njk->nik", rig.rotation, track.rotations),
            rig.apply_points(track.translations),
        )
        box = self.TARGET.as_box()
        corners = np.array([rig.apply_points(box.min), rig.apply_points(box.max)])
        rot_target = ObjectTarget("t", box=Aabb(corners.min(axis=0), corners.max(axis=0)))
        a = find_prime_time(track, self.event(), w=10.0)
        b = find_prime_time(rot_track, InteractionEvent("pick", 10.0, rot_target), w=10.0)
        assert a.t_p == b.t_p


class TestPrimeEvents:
    def test_filters_and_preserves_order(self):
        times = np.arange(0.0, 20.0, 0.5)
        track = sweeping_track(times, on_from=5.0, target_dir=(0, 0, 1))
        good = ObjectTarget("g", box=Aabb.from_center(vec3(0, 0, 5), vec3(0.2, 0.2, 0.2)))
        bad = ObjectTarget("b", box=Aabb.from_center(vec3(5, 0, 0), vec3(0.2, 0.2, 0.2)))
        events = [
            InteractionEvent("pick", 8.0, good),
            InteractionEvent("put", 9.0, bad),
            InteractionEvent("pick", 12.0, good),
        ]
        out = prime_events(track, events)
        assert [p.event.t_e for p in out] == [8.0, 12.0]

    def test_empty_events(self):
        track = straight_track([0.0, 1.0])
        assert prime_events(track, []) == []

    def test_empty_window_skips_with_warning(self, caplog):
        track = straight_track([0.0, 1.0])
        tgt = ObjectTarget("g", box=Aabb.from_center(vec3(0, 0, 5), vec3(0.2, 0.2, 0.2)))
        events = [InteractionEvent("pick", 50.0, tgt)]
        with caplog.at_level("WARNING", logger="pnr.gaze"):
            out = prime_events(track, events, w=5.0)
        assert out == []
        assert any("skipping" in r.message for r in caplog.records)

    def test_boundary_priming_at_window_start(self):
        # all events primeable exactly at t_e - w
        times = np.arange(0.0, 30.0, 0.5)
        track = sweeping_track(times, on_from=0.0, target_dir=(0, 0, 1))
        tgt = ObjectTarget("g", box=Aabb.from_center(vec3(0, 0, 5), vec3(0.2, 0.2, 0.2)))
        events = [InteractionEvent("pick", te, tgt) for te in (6.0, 8.0, 10.0)]
        out = prime_events(track, events, w=4.0)
        assert [p.t_p for p in out] == [2.0, 4.0, 6.0]


def test_track_from_samples_roundtrip():
    samples = [identity_sample(0.0, (0, 0, 1)), identity_sample(0.5, (0, 1, 1))]
    track = GazeTrack.from_samples(samples)
    back = track.sample(1)
    assert back.t == 0.5
    assert np.allclose(back.gaze_point_cam, [0, 1, 1])
