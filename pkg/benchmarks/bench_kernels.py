"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat N]

Also runs one full hotspot-preset simulation per backend to show the
end-to-end effect.  The numba timings exclude JIT compilation (a warm-up call
runs first).
"""

from __future__ import annotations

import argparse
import time
from dataclasses import replace

import numpy as np

from uavmon import _accel, kernels
from uavmon.engine import run
from uavmon.policies import _canonical_tour, distance_matrix
from uavmon.presets import hotspot_preset
from uavmon.traces import GridSpec


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def encounter_inputs(rounds, animals, seed=0):
    rng = np.random.default_rng(seed)
    uav = np.cumsum(rng.normal(0, 300, (rounds, 2)), axis=0)
    pos = np.cumsum(rng.normal(0, 30, (animals, rounds, 2)), axis=1) + uav[None, :1, :]
    return uav, pos


def row(label, t_numba, t_numpy):
    print(f"{label:<34} {t_numba * 1e3:>10.3f} {t_numpy * 1e3:>10.3f} {t_numpy / t_numba:>8.1f}x")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    print(f"{'kernel':<34} {'numba ms':>10} {'numpy ms':>10} {'speedup':>9}")
    for rows, cols in [(3, 3), (3, 4), (4, 4), (4, 5)]:
        d = distance_matrix(GridSpec(1000.0 * cols, 1000.0 * rows, rows, cols))
        kernels.held_karp_numba(d)
        row(f"held_karp {rows}x{cols} ({rows * cols} nodes)",
            best_of(lambda: kernels.held_karp_numba(d), args.repeat),
            best_of(lambda: kernels.held_karp_numpy(d), args.repeat))

    for rounds, animals in [(4000, 5), (40_000, 50)]:
        uav, pos = encounter_inputs(rounds, animals)
        kernels.encounter_episodes_numba(uav, pos, 200.0)
        row(f"encounters {rounds} rounds x {animals}",
            best_of(lambda: kernels.encounter_episodes_numba(uav, pos, 200.0), args.repeat),
            best_of(lambda: kernels.encounter_episodes_numpy(uav, pos, 200.0), args.repeat))

    cfg, data = hotspot_preset()
    cfg = replace(cfg, grid=GridSpec(10_000.0, 10_000.0, 4, 5), policy=replace(cfg.policy, kind="tsp"))
    traces = data(0)
    timings = {}
    for flag in (True, False):
        _accel.USE_NUMBA = flag
        _canonical_tour.cache_clear()
        run(cfg, traces)
        _canonical_tour.cache_clear()
        timings[flag] = best_of(lambda: (_canonical_tour.cache_clear(), run(cfg, traces)), max(1, args.repeat // 2))
    _accel.USE_NUMBA = _accel.NUMBA_AVAILABLE
    row("full run, tsp on 4x5, 4000 rounds", timings[True], timings[False])


if __name__ == "__main__":
    main()
