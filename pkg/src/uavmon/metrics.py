"""Aggregation of run results into curves, delay summaries, encounter stats and sweeps."""

from __future__ import annotations

import io
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .engine import RunResult, SimConfig, run_many
from .errors import AggregationError, ConfigError
from .traces import GridSpec

SWEEP_AXES = ("epsilon", "grid")


@dataclass(frozen=True)
class DelaySummary:
    """Five-number summary plus mean of collection delays, in rounds.

    Quartiles interpolate linearly between closest ranks: for sorted delays
    ``d[0..n-1]`` the p-quantile is read at fractional index ``p * (n - 1)``.
    An empty summary (``count == 0``) has every statistic set to ``None``.
    """

    count: int
    min: float | None = None
    q1: float | None = None
    median: float | None = None
    q3: float | None = None
    max: float | None = None
    mean: float | None = None

    @property
    def is_empty(self) -> bool:
        return self.count == 0


EMPTY_DELAYS = DelaySummary(count=0)


@dataclass(frozen=True)
class SweepRow:
    value: float
    mean_final_voi: float
    stddev_final_voi: float


def _quantile(sorted_vals: np.ndarray, p: float) -> float:
    pos = p * (sorted_vals.size - 1)
    lo = int(np.floor(pos))
    hi = min(lo + 1, sorted_vals.size - 1)
    frac = pos - lo
    return float(sorted_vals[lo] + (sorted_vals[hi] - sorted_vals[lo]) * frac)


def summarize_delays(results) -> DelaySummary:
    """Pool the delays of every collected event across ``results``."""
    parts = [np.asarray(r.delays if isinstance(r, RunResult) else r, dtype=float) for r in results]
    pooled = np.sort(np.concatenate(parts)) if parts else np.empty(0)
    if pooled.size == 0:
        return EMPTY_DELAYS
    return DelaySummary(
        count=int(pooled.size),
        min=float(pooled[0]),
        q1=_quantile(pooled, 0.25),
        median=_quantile(pooled, 0.5),
        q3=_quantile(pooled, 0.75),
        max=float(pooled[-1]),
        mean=float(pooled.mean()),
    )


def mean_voi_curve(results) -> np.ndarray:
    curves = [np.asarray(r.voi_timeline if isinstance(r, RunResult) else r, dtype=float) for r in results]
    if not curves:
        raise AggregationError("no results to average")
    n = curves[0].size
    if any(c.size != n for c in curves):
        raise AggregationError(f"timeline lengths differ: {sorted({c.size for c in curves})}")
    # sorted accumulation keeps the mean independent of result order
    stacked = np.sort(np.vstack(curves), axis=0)
    return stacked.sum(axis=0) / len(curves)


def _mean_std(xs) -> tuple:
    a = np.sort(np.asarray(xs, dtype=float))
    if a.size == 0:
        return 0.0, 0.0
    return float(a.mean()), float(a.std())


def final_voi_stats(results) -> tuple:
    """(mean, population std) of the final cumulative VoI."""
    return _mean_std([r.final_voi for r in results])


def encounter_stats(results) -> tuple:
    """(mean, population std) of the encounter-episode count."""
    return _mean_std([r.encounters for r in results])


def policy_summary(kind: str, results) -> dict:
    mean, std = final_voi_stats(results)
    d = summarize_delays(results)
    enc_mean, enc_std = encounter_stats(results)
    return {
        "policy": kind,
        "mean_final_voi": mean,
        "stddev": std,
        "mean_delay": d.mean,
        "median_delay": d.median,
        "q1": d.q1,
        "q3": d.q3,
        "encounters_mean": enc_mean,
        "encounters_std": enc_std,
    }


def sweep_config(config: SimConfig, axis: str, value) -> SimConfig:
    if axis == "epsilon":
        return replace(config, policy=replace(config.policy, epsilon=float(value)))
    if axis == "grid":
        n = int(value)
        if n != value or n < 1:
            raise ConfigError(f"grid sweep values must be positive integers, got {value}")
        g = config.grid
        return replace(config, grid=GridSpec(g.area_width, g.area_height, n, n), start_cell=None)
    raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}, got {axis!r}")


def sweep(config: SimConfig, axis: str, values, dataset, workers: int = 1) -> list:
    """``run_many`` per value of ``axis`` ("epsilon" or "grid" cells per side)."""
    values = list(values)
    if not values:
        raise ConfigError("sweep needs at least one value")
    rows = []
    for v in values:
        results = run_many(sweep_config(config, axis, v), dataset, workers=workers)
        mean, std = final_voi_stats(results)
        rows.append(SweepRow(v, mean, std))
    return rows


# --- CSV output -------------------------------------------------------------


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


SUMMARY_HEADER = (
    "policy",
    "mean_final_voi",
    "stddev",
    "mean_delay",
    "median_delay",
    "q1",
    "q3",
    "encounters_mean",
    "encounters_std",
)


def summary_csv(summaries) -> str:
    return _csv(SUMMARY_HEADER, ([s[k] for k in SUMMARY_HEADER] for s in summaries))


def voi_curve_csv(curves: dict) -> str:
    kinds = list(curves)
    n = len(next(iter(curves.values())))
    rows = ([t] + [float(curves[k][t]) for k in kinds] for t in range(n))
    return _csv(["round", *kinds], rows)


def sweep_csv(rows) -> str:
    return _csv(("axis_value", "mean_final_voi", "stddev"), ((r.value, r.mean_final_voi, r.stddev_final_voi) for r in rows))


def run_voi_csv(result: RunResult) -> str:
    return _csv(("round", "cumulative_voi"), ((t, float(v)) for t, v in enumerate(result.voi_timeline)))


def run_events_csv(result: RunResult) -> str:
    header = ("event_id", "animal_id", "cell_row", "cell_col", "created_round", "collected_round", "delay", "voi_collected")
    rows = []
    for e in result.events:
        done = e.collected_round is not None
        rows.append((
            e.event_id,
            e.animal_id,
            e.cell[0],
            e.cell[1],
            e.created_round,
            e.collected_round,
            e.collected_round - e.created_round if done else None,
            result.event_voi.get(e.event_id) if done else None,
        ))
    return _csv(header, rows)


def run_encounters_csv(result: RunResult) -> str:
    return _csv(("animal_id", "open_round", "close_round"), result.episodes)


def write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))


def write_run_files(result: RunResult, directory) -> None:
    """Per-run CSVs: VoI timeline, event log, encounters and (MDP) Q-table snapshots."""
    d = Path(directory)
    stem = f"seed{result.seed}"
    write_text(d / f"{stem}_voi.csv", run_voi_csv(result))
    write_text(d / f"{stem}_events.csv", run_events_csv(result))
    write_text(d / f"{stem}_encounters.csv", run_encounters_csv(result))
    if result.q_table is not None:
        write_text(d / f"{stem}_qtable.csv", result.q_table)
    for rnd, text in sorted(result.q_snapshots.items()):
        write_text(d / "qtables" / f"{stem}_round{rnd}.csv", text)
