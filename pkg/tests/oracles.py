"""Independent brute-force oracles used to check the analytic geometry.

The containment oracle never looks at parametric intervals: it walks a
dense grid of points along each ray and asks the box directly. Slow by
construction, so the batched form is JIT-compiled when numba is present.
"""

import numpy as np

N_SAMPLES = 10_000
T_MAX = 100.0


def dense_hit_single(origin, direction, bmin, bmax, n_samples=N_SAMPLES, t_max=T_MAX):
    """True iff any sampled point o + t*d with t in [0, t_max] lies in the box."""
    t = np.linspace(0.0, t_max, n_samples)
    pts = origin[None, :] + t[:, None] * direction[None, :]
    inside = np.all((pts >= bmin) & (pts <= bmax), axis=1)
    return bool(inside.any())


def _dense_hit_batch_numpy(origins, dirs, bmins, bmaxs, n_samples, t_max):
    t = np.linspace(0.0, t_max, n_samples)
    out = np.zeros(len(origins), dtype=np.bool_)
    chunk = 256
    for s in range(0, len(origins), chunk):
        e = min(s + chunk, len(origins))
        pts = origins[s:e, None, :] + t[None, :, None] * dirs[s:e, None, :]
        inside = np.all(
            (pts >= bmins[s:e, None, :]) & (pts <= bmaxs[s:e, None, :]), axis=2
        )
        out[s:e] = inside.any(axis=1)
    return out


try:
    import numba

    @numba.njit(parallel=True, cache=True)
    def _dense_hit_batch_numba(origins, dirs, bmins, bmaxs, n_samples, t_max):
        n = origins.shape[0]
        out = np.zeros(n, dtype=np.bool_)
        step = t_max / (n_samples - 1)
        for i in numba.prange(n):
            ox, oy, oz = origins[i, 0], origins[i, 1], origins[i, 2]
            dx, dy, dz = dirs[i, 0], dirs[i, 1], dirs[i, 2]
            for k in range(n_samples):
                t = k * step
                x = ox + t * dx
                if x < bmins[i, 0] or x > bmaxs[i, 0]:
                    continue
                y = oy + t * dy
                if y < bmins[i, 1] or y > bmaxs[i, 1]:
                    continue
                z = oz + t * dz
                if z < bmins[i, 2] or z > bmaxs[i, 2]:
                    continue
                out[i] = True
                break
        return out

    def dense_hit_batch(origins, dirs, bmins, bmaxs, n_samples=N_SAMPLES, t_max=T_MAX):
        return _dense_hit_batch_numba(
            np.ascontiguousarray(origins),
            np.ascontiguousarray(dirs),
            np.ascontiguousarray(bmins),
            np.ascontiguousarray(bmaxs),
            n_samples,
            t_max,
        )

except ImportError:  # pragma: no cover - numba is in the test extra

    def dense_hit_batch(origins, dirs, bmins, bmaxs, n_samples=N_SAMPLES, t_max=T_MAX):
        return _dense_hit_batch_numpy(origins, dirs, bmins, bmaxs, n_samples, t_max)


def support_windows(origins, dirs, bmins, bmaxs, t_max=T_MAX):
    """Per-pair sampling window [t0, t1] from the box's exact projection
    onto the ray line (support function of the box: half-width
    sum_j h_j * |d_j| around the center's projection), clipped to
    [0, t_max]. Any ray-box intersection lies inside this window, so
    focusing the sample budget here is sound and independent of the slab
    interval computation."""
    centers = 0.5 * (bmins + bmaxs)
    halves = 0.5 * (bmaxs - bmins)
    t_c = np.einsum("ij,ij->i", centers - origins, dirs)
    w = np.einsum("ij,ij->i", halves, np.abs(dirs))
    t0 = np.clip(t_c - w, 0.0, t_max)
    t1 = np.clip(t_c + w, 0.0, t_max)
    return t0, t1


def _focused_hit_batch_numpy(origins, dirs, bmins, bmaxs, n_samples, t_max):
    t0, t1 = support_windows(origins, dirs, bmins, bmaxs, t_max)
    out = np.zeros(len(origins), dtype=np.bool_)
    for i in range(len(origins)):
        if t1[i] <= t0[i]:
            continue
        t = np.linspace(t0[i], t1[i], n_samples)
        pts = origins[i] + t[:, None] * dirs[i]
        out[i] = bool(np.all((pts >= bmins[i]) & (pts <= bmaxs[i]), axis=1).any())
    return out


try:
    import numba as _numba

    @_numba.njit(parallel=True, cache=True)
    def _focused_hit_kernel(origins, dirs, bmins, bmaxs, t0s, t1s, n_samples):
        n = origins.shape[0]
        out = np.zeros(n, dtype=np.bool_)
        for i in _numba.prange(n):
            t0, t1 = t0s[i], t1s[i]
            if t1 <= t0:
                continue
            step = (t1 - t0) / (n_samples - 1)
            for k in range(n_samples):
                t = t0 + k * step
                x = origins[i, 0] + t * dirs[i, 0]
                if x < bmins[i, 0] or x > bmaxs[i, 0]:
                    continue
                y = origins[i, 1] + t * dirs[i, 1]
                if y < bmins[i, 1] or y > bmaxs[i, 1]:
                    continue
                z = origins[i, 2] + t * dirs[i, 2]
                if z < bmins[i, 2] or z > bmaxs[i, 2]:
                    continue
                out[i] = True
                break
        return out

    def focused_hit_batch(origins, dirs, bmins, bmaxs, n_samples=N_SAMPLES, t_max=T_MAX):
        t0, t1 = support_windows(origins, dirs, bmins, bmaxs, t_max)
        return _focused_hit_kernel(
            np.ascontiguousarray(origins), np.ascontiguousarray(dirs),
            np.ascontiguousarray(bmins), np.ascontiguousarray(bmaxs),
            t0, t1, n_samples,
        )

except ImportError:  # pragma: no cover

    def focused_hit_batch(origins, dirs, bmins, bmaxs, n_samples=N_SAMPLES, t_max=T_MAX):
        return _focused_hit_batch_numpy(origins, dirs, bmins, bmaxs, n_samples, t_max)


def oracle_grid_steps(origins, dirs, bmins, bmaxs, n_samples=N_SAMPLES, t_max=T_MAX):
    """Sample spacing of the focused oracle per pair: chords thinner than
    this are below the oracle's resolving power."""
    t0, t1 = support_windows(origins, dirs, bmins, bmaxs, t_max)
    return np.maximum(t1 - t0, 0.0) / (n_samples - 1)


def sample_box_surface(box, n=20_000, rng=None):
    """Uniform-ish points on the box surface, for cross-checking near-miss
    surface distances by direct minimization."""
    rng = rng or np.random.default_rng(0)
    mn, mx = box.min, box.max
    pts = rng.uniform(mn, mx, size=(n, 3))
    face_axis = rng.integers(0, 3, size=n)
    face_side = rng.integers(0, 2, size=n)
    for i in range(3):
        m = face_axis == i
        pts[m & (face_side == 0), i] = mn[i]
        pts[m & (face_side == 1), i] = mx[i]
    return pts
