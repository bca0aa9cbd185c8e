import numpy as np
import pytest

from pnr.errors import TimelineMismatch
from pnr.events import (
    InHandSegment,
    Trajectory3,
    in_hand_segments,
    object_speeds,
    refine_and_emit_events,
)


def traj_from_distances(distances, hz=1.0):
    """Hand at given scalar distances from a fixed object along x."""
    n = len(distances)
    times = np.arange(n) / hz
    obj = Trajectory3(times, np.zeros((n, 3)))
    hand_pos = np.zeros((n, 3))
    hand_pos[:, 0] = distances
    return Trajectory3(times, hand_pos), obj


def step_object(t_start, t_stop, speed=0.3, fps=10.0, total=12.0):
    """Object at rest, moving at `speed` during [t_start, t_stop], then at
    rest again."""
    times = np.arange(0.0, total, 1.0 / fps)
    pos = np.zeros((len(times), 3))
    moving = np.clip(times, t_start, t_stop) - t_start
    pos[:, 0] = moving * speed
    return Trajectory3(times, pos)


class TestInHandSegments:
    def test_single_run(self):
        hand, obj = traj_from_distances([0.10, 0.04, 0.03, 0.12])
        segs = in_hand_segments(hand, obj, dist_threshold=0.05)
        assert len(segs) == 1
        assert segs[0].start_t == 1.0
        assert segs[0].end_t == 2.0

    def test_all_far_is_empty(self):
        hand, obj = traj_from_distances([0.3, 0.5, 0.06, 0.05])
        assert in_hand_segments(hand, obj, dist_threshold=0.05) == []

    def test_two_runs_split_by_far_frame(self):
        hand, obj = traj_from_distances([0.02, 0.03, 0.20, 0.03, 0.02])
        segs = in_hand_segments(hand, obj, dist_threshold=0.05)
        assert len(segs) == 2
        assert (segs[0].start_t, segs[0].end_t) == (0.0, 1.0)
        assert (segs[1].start_t, segs[1].end_t) == (3.0, 4.0)

    def test_min_duration_suppresses_flicker(self):
        hand, obj = traj_from_distances([0.2, 0.03, 0.2, 0.2], hz=10.0)
        assert in_hand_segments(hand, obj, dist_threshold=0.05) == []

    def test_timeline_mismatch(self):
        hand, obj = traj_from_distances([0.1, 0.1, 0.1])
        other = Trajectory3(obj.times + 0.01, obj.positions)
        with pytest.raises(TimelineMismatch):
            in_hand_segments(hand, other)

    def test_raising_threshold_never_shrinks_coverage(self):
        rng = np.random.default_rng(4)
        d = rng.uniform(0.0, 0.2, 60)
        hand, obj = traj_from_distances(d, hz=10.0)

        def coverage(th):
            return sum(s.end_t - s.start_t for s in in_hand_segments(hand, obj, th))

        last = 0.0
        for th in (0.02, 0.05, 0.1, 0.15, 0.25):
            c = coverage(th)
            assert c >= last - 1e-12
            last = c


class TestRefineEvents:
    def test_pick_at_planted_motion_start(self):
        obj = step_object(t_start=3.0, t_stop=6.0)
        segs = [InHandSegment(2.8, 6.2)]
        events = refine_and_emit_events(segs, obj)
        picks = [e for e in events if e.kind == "pick"]
        assert picks[0].t_e == pytest.approx(3.0)
        assert not picks[0].low_confidence

    def test_put_at_planted_motion_stop(self):
        obj = step_object(t_start=3.0, t_stop=7.5)
        segs = [InHandSegment(2.8, 7.8)]
        events = refine_and_emit_events(segs, obj)
        puts = [e for e in events if e.kind == "put"]
        assert puts[0].t_e == pytest.approx(7.5)
        assert not puts[0].low_confidence

    def test_static_object_falls_back_flagged(self):
        times = np.arange(0.0, 10.0, 0.1)
        obj = Trajectory3(times, np.zeros((len(times), 3)))
        events = refine_and_emit_events([InHandSegment(2.0, 5.0)], obj)
        pick = next(e for e in events if e.kind == "pick")
        put = next(e for e in events if e.kind == "put")
        assert pick.t_e == 2.0 and pick.low_confidence
        assert put.t_e == 5.0 and put.low_confidence

    def test_pick_precedes_put_within_slack(self):
        obj = step_object(t_start=3.0, t_stop=6.0)
        seg = InHandSegment(2.8, 6.2)
        events = refine_and_emit_events([seg], obj)
        pick = next(e for e in events if e.kind == "pick")
        put = next(e for e in events if e.kind == "put")
        assert pick.t_e < put.t_e
        for e in (pick, put):
            assert seg.start_t - 0.5 <= e.t_e <= seg.end_t + 0.5

    def test_target_box_centered_on_event_position(self):
        obj = step_object(t_start=3.0, t_stop=6.0, speed=0.5)
        events = refine_and_emit_events([InHandSegment(2.8, 6.2)], obj)
        pick = next(e for e in events if e.kind == "pick")
        box = pick.target.as_box()
        assert np.allclose(box.center, obj.at(pick.t_e), atol=1e-9)
        assert np.allclose(box.half_extents, 0.05)

    def test_time_reversal_swaps_pick_put(self):
        obj = step_object(t_start=3.0, t_stop=6.0, total=10.0)
        seg = InHandSegment(2.8, 6.2)
        fwd = refine_and_emit_events([seg], obj)

        t_total = obj.times[-1]
        rev = Trajectory3(t_total - obj.times[::-1], obj.positions[::-1])
        rev_seg = InHandSegment(t_total - seg.end_t, t_total - seg.start_t)
        bwd = refine_and_emit_events([rev_seg], rev)

        fwd_pick = next(e for e in fwd if e.kind == "pick")
        fwd_put = next(e for e in fwd if e.kind == "put")
        bwd_pick = next(e for e in bwd if e.kind == "pick")
        bwd_put = next(e for e in bwd if e.kind == "put")
        assert bwd_pick.t_e == pytest.approx(t_total - fwd_put.t_e)
        assert bwd_put.t_e == pytest.approx(t_total - fwd_pick.t_e)


def test_object_speeds_step_profile():
    obj = step_object(t_start=3.0, t_stop=6.0, speed=0.3, fps=10.0)
    s = object_speeds(obj)
    t = obj.times
    assert np.all(s[t < 2.8] < 0.02)
    assert np.all(s[(t > 3.2) & (t < 5.8)] > 0.2)
    assert np.all(s[t > 6.2] < 0.02)
