"""Hot numeric kernels, each with a numba loop and a vectorised numpy twin.

The public functions dispatch on :data:`uavmon._accel.USE_NUMBA`; the
``*_numba`` / ``*_numpy`` variants are importable directly so tests and the
benchmark can compare them.
"""

from __future__ import annotations

import numpy as np

from . import _accel
from ._accel import njit

# ---------------------------------------------------------------------------
# Held-Karp over a dense distance matrix, node 0 fixed as the tour origin.
#
# dp[mask, j]: cheapest path that leaves node 0, visits exactly the nodes in
# ``mask`` (bit j <-> node j + 1) and ends at node j + 1.  Ties keep the
# lowest-index predecessor in both implementations, so they return the same
# tour bit for bit.
# ---------------------------------------------------------------------------


@njit
def _held_karp_tables_numba(dist):
    n = dist.shape[0]
    m = n - 1
    size = 1 << m
    dp = np.full((size, m), np.inf)
    parent = np.full((size, m), -1, dtype=np.int64)
    for j in range(m):
        dp[1 << j, j] = dist[0, j + 1]
    for mask in range(1, size):
        for j in range(m):
            bj = 1 << j
            if (mask & bj) == 0 or mask == bj:
                continue
            prev = mask ^ bj
            best = np.inf
            arg = -1
            for k in range(m):
                if (prev >> k) & 1:
                    c = dp[prev, k] + dist[k + 1, j + 1]
                    if c < best:
                        best = c
                        arg = k
            dp[mask, j] = best
            parent[mask, j] = arg
    return dp, parent


def _held_karp_tables_numpy(dist):
    n = dist.shape[0]
    m = n - 1
    size = 1 << m
    dp = np.full((size, m), np.inf)
    parent = np.full((size, m), -1, dtype=np.int64)
    inner = dist[1:, 1:]
    idx = np.arange(m)
    dp[1 << idx, idx] = dist[0, 1:]
    bits = (np.arange(size)[:, None] >> idx) & 1
    for mask in range(1, size):
        js = idx[bits[mask].astype(bool)]
        if js.size < 2:
            continue
        prevs = mask ^ (1 << js)
        cand = dp[prevs, :] + inner[:, js].T
        arg = np.argmin(cand, axis=1)
        dp[mask, js] = cand[np.arange(js.size), arg]
        parent[mask, js] = arg
    return dp, parent


def _held_karp_finish(dist, dp, parent):
    n = dist.shape[0]
    m = n - 1
    full = (1 << m) - 1
    closing = dp[full, :] + dist[1:, 0]
    last = int(np.argmin(closing))
    length = float(closing[last])
    order = []
    mask = full
    j = last
    while j >= 0:
        order.append(j + 1)
        pj = int(parent[mask, j])
        mask ^= 1 << j
        j = pj
    order.append(0)
    order.reverse()
    return length, order


def _held_karp_trivial(dist):
    n = dist.shape[0]
    if n == 1:
        return 0.0, [0]
    return float(dist[0, 1] + dist[1, 0]), [0, 1]


def held_karp_numba(dist):
    dist = np.ascontiguousarray(dist, dtype=np.float64)
    if dist.shape[0] <= 2:
        return _held_karp_trivial(dist)
    dp, parent = _held_karp_tables_numba(dist)
    return _held_karp_finish(dist, dp, parent)


def held_karp_numpy(dist):
    dist = np.ascontiguousarray(dist, dtype=np.float64)
    if dist.shape[0] <= 2:
        return _held_karp_trivial(dist)
    dp, parent = _held_karp_tables_numpy(dist)
    return _held_karp_finish(dist, dp, parent)


def held_karp(dist):
    """Minimum Hamiltonian cycle through all nodes of ``dist``.

    Returns ``(length, order)`` where ``order`` starts at node 0 and lists each
    node once; the cycle closes back to node 0.  O(2^n n^2) time.
    """
    if _accel.USE_NUMBA:
        return held_karp_numba(dist)
    return held_karp_numpy(dist)


# ---------------------------------------------------------------------------
# Encounter episodes: maximal runs of rounds where an animal is within
# ``radius`` of the UAV.  Absent animals (NaN position) are never inside.
# Output rows are (animal_index, open_round, close_round) with close_round the
# first round outside the radius, or -1 when still open at the end.
# ---------------------------------------------------------------------------


@njit
def _encounter_episodes_numba(uav_xy, animal_xy, radius):
    n_animals = animal_xy.shape[0]
    n_rounds = uav_xy.shape[0]
    r2 = radius * radius
    inside = np.zeros((n_animals, n_rounds), dtype=np.bool_)
    count = 0
    for a in range(n_animals):
        prev = False
        for t in range(n_rounds):
            dx = animal_xy[a, t, 0] - uav_xy[t, 0]
            dy = animal_xy[a, t, 1] - uav_xy[t, 1]
            d2 = dx * dx + dy * dy
            now = d2 <= r2
            inside[a, t] = now
            if now and not prev:
                count += 1
            prev = now
    out = np.empty((count, 3), dtype=np.int64)
    k = 0
    for a in range(n_animals):
        prev = False
        for t in range(n_rounds):
            now = inside[a, t]
            if now and not prev:
                out[k, 0] = a
                out[k, 1] = t
                out[k, 2] = -1
            elif prev and not now:
                out[k, 2] = t
                k += 1
            prev = now
        if prev:
            k += 1
    return out


def encounter_episodes_numba(uav_xy, animal_xy, radius):
    uav_xy = np.ascontiguousarray(uav_xy, dtype=np.float64)
    animal_xy = np.ascontiguousarray(animal_xy, dtype=np.float64)
    return _encounter_episodes_numba(uav_xy, animal_xy, float(radius))


def encounter_episodes_numpy(uav_xy, animal_xy, radius):
    uav_xy = np.asarray(uav_xy, dtype=np.float64)
    animal_xy = np.asarray(animal_xy, dtype=np.float64)
    n_animals, n_rounds = animal_xy.shape[:2]
    delta = animal_xy - uav_xy[None, :, :]
    d2 = delta[..., 0] * delta[..., 0] + delta[..., 1] * delta[..., 1]
    with np.errstate(invalid="ignore"):
        inside = d2 <= radius * radius
    padded = np.zeros((n_animals, n_rounds + 2), dtype=np.int8)
    padded[:, 1:-1] = inside
    edges = np.diff(padded, axis=1)
    oa, ot = np.nonzero(edges == 1)
    ca, ct = np.nonzero(edges == -1)
    # opens and closes pair up one-to-one in row-major order
    out = np.empty((oa.size, 3), dtype=np.int64)
    out[:, 0] = oa
    out[:, 1] = ot
    out[:, 2] = np.where(ct == n_rounds, -1, ct)
    return out


def encounter_episodes(uav_xy, animal_xy, radius):
    """Encounter episodes between one UAV path ``(T, 2)`` and animals ``(A, T, 2)``."""
    if _accel.USE_NUMBA:
        return encounter_episodes_numba(uav_xy, animal_xy, radius)
    return encounter_episodes_numpy(uav_xy, animal_xy, radius)
