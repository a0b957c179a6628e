"""Grid discretisation, trace ingestion, event generation and synthetic traces."""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import ConfigError, DataError
from .voi import InitialRewardParams, initial_reward

TRACE_HEADER = ("animal_id", "round", "x_m", "y_m")

# ground speed cap for synthetic animals in transit: 1 km per 30 rounds
MAX_ANIMAL_SPEED = 1000.0 / 30.0

Cell = tuple  # (row, col)


class GeoPoint(NamedTuple):
    """Planar position in metres; ``x`` east and ``y`` north of the area origin."""

    x: float
    y: float


class TraceSample(NamedTuple):
    animal_id: str
    round: int
    pos: GeoPoint


@dataclass(frozen=True)
class GridSpec:
    area_width: float
    area_height: float
    rows: int
    cols: int

    def __post_init__(self):
        if not (self.area_width > 0 and self.area_height > 0):
            raise ConfigError(f"area must be positive, got {self.area_width} x {self.area_height}")
        if self.rows < 1 or self.cols < 1:
            raise ConfigError(f"grid must have >= 1 row and column, got {self.rows} x {self.cols}")

    @property
    def cell_width(self) -> float:
        return self.area_width / self.cols

    @property
    def cell_height(self) -> float:
        return self.area_height / self.rows

    @property
    def n_cells(self) -> int:
        return self.rows * self.cols

    def contains(self, cell) -> bool:
        r, c = cell
        return 0 <= r < self.rows and 0 <= c < self.cols

    def cells(self) -> list:
        return [(r, c) for r in range(self.rows) for c in range(self.cols)]

    def center(self, cell) -> GeoPoint:
        r, c = cell
        return GeoPoint((c + 0.5) * self.cell_width, (r + 0.5) * self.cell_height)

    def in_bounds(self, pos) -> bool:
        return 0.0 <= pos[0] <= self.area_width and 0.0 <= pos[1] <= self.area_height


@dataclass
class AnimalEvent:
    animal_id: str
    cell: tuple
    created_round: int
    initial_reward: float
    collected_round: int | None = None
    event_id: int = -1


def cell_of(pos, grid: GridSpec) -> tuple:
    """Row/column of the cell containing ``pos``; the far edges belong to the last cell."""
    x, y = pos
    if not grid.in_bounds(pos):
        raise DataError(f"position ({x}, {y}) outside {grid.area_width} x {grid.area_height} m area")
    row = min(int(math.floor(y / grid.cell_height)), grid.rows - 1)
    col = min(int(math.floor(x / grid.cell_width)), grid.cols - 1)
    return row, col


def group_by_animal(samples: Iterable[TraceSample]) -> dict:
    """Samples per animal in first-appearance order, each list sorted by round."""
    out: dict = defaultdict(list)
    for s in samples:
        out[s.animal_id].append(s)
    for lst in out.values():
        lst.sort(key=lambda s: s.round)
    return dict(out)


def generate_events(
    traces,
    grid: GridSpec,
    dwell_period: int,
    ir: InitialRewardParams | float,
) -> list:
    """Sensed events from per-animal traces.

    An animal produces an event on its first sample, on every sample whose cell
    differs from the previous sample's, and otherwise once ``dwell_period``
    rounds have elapsed since its last event.  ``traces`` is either a flat
    sample list or a mapping ``animal_id -> samples``.  The result is ordered
    by (created_round, animal order) and carries sequential ``event_id``s.
    """
    if dwell_period < 1:
        raise ConfigError(f"dwell_period must be >= 1, got {dwell_period}")
    reward = ir if isinstance(ir, (int, float)) else initial_reward(ir)
    by_animal = traces if isinstance(traces, dict) else group_by_animal(traces)

    events = []
    for order, (aid, samples) in enumerate(by_animal.items()):
        prev_cell = None
        last_round = None
        for s in samples:
            cell = cell_of(s.pos, grid)
            if prev_cell is None or cell != prev_cell or s.round - last_round >= dwell_period:
                events.append((s.round, order, AnimalEvent(aid, cell, int(s.round), reward)))
                last_round = s.round
            prev_cell = cell
    events.sort(key=lambda e: (e[0], e[1]))
    out = [e[2] for e in events]
    for i, ev in enumerate(out):
        ev.event_id = i
    return out


def validate_traces(samples: Sequence[TraceSample], grid: GridSpec) -> None:
    """Reject out-of-area samples and non-increasing rounds, reporting the first offender."""
    bad = [s for s in samples if not grid.in_bounds(s.pos)]
    if bad:
        s = bad[0]
        raise DataError(
            f"{len(bad)} sample(s) outside the {grid.area_width:g} x {grid.area_height:g} m area; "
            f"first: animal {s.animal_id} round {s.round} at ({s.pos.x}, {s.pos.y})"
        )
    last: dict = {}
    for s in samples:
        if s.round < 0:
            raise DataError(f"negative round {s.round} for animal {s.animal_id}")
        if s.animal_id in last and s.round <= last[s.animal_id]:
            raise DataError(
                f"rounds not strictly increasing for animal {s.animal_id} at round {s.round}"
            )
        last[s.animal_id] = s.round


def read_traces(path) -> list:
    """Parse a trace CSV (``animal_id,round,x_m,y_m``)."""
    path = Path(path)
    samples = []
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(h.strip() for h in header) != TRACE_HEADER:
                raise DataError(f"{path}: expected header {','.join(TRACE_HEADER)}, got {header}")
            for lineno, rec in enumerate(reader, start=2):
                if not rec:
                    continue
                try:
                    aid, rnd, x, y = rec
                    rnd_i = int(rnd)
                    samples.append(TraceSample(aid.strip(), rnd_i, GeoPoint(float(x), float(y))))
                except ValueError as exc:
                    raise DataError(f"{path}:{lineno}: bad record {rec!r} ({exc})") from None
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    return samples


def format_traces(samples: Iterable[TraceSample]) -> str:
    buf = io.StringIO()
    buf.write(",".join(TRACE_HEADER) + "\n")
    for s in samples:
        buf.write(f"{s.animal_id},{s.round},{s.pos.x!r},{s.pos.y!r}\n")
    return buf.getvalue()


def write_traces(samples: Iterable[TraceSample], path) -> None:
    Path(path).write_bytes(format_traces(samples).encode("utf-8"))


def project_latlon(records, margin_m: float = 0.0):
    """Equirectangular projection of ``(animal_id, round, lat, lon)`` records to planar metres.

    Projects about the centroid latitude and shifts so the smallest coordinate
    sits at ``margin_m``.  Returns ``(samples, width, height)`` where the extent
    includes the margin on both sides.  Meant for offline conversion of real
    GPS datasets to the trace CSV format.
    """
    earth_r = 6_371_008.8
    records = list(records)
    if not records:
        return [], 0.0, 0.0
    lats = np.array([r[2] for r in records], dtype=float)
    lons = np.array([r[3] for r in records], dtype=float)
    lat0 = math.radians(float(lats.mean()))
    xs = np.radians(lons) * earth_r * math.cos(lat0)
    ys = np.radians(lats) * earth_r
    xs = xs - xs.min() + margin_m
    ys = ys - ys.min() + margin_m
    samples = [
        TraceSample(str(r[0]), int(r[1]), GeoPoint(float(x), float(y)))
        for r, x, y in zip(records, xs, ys)
    ]
    return samples, float(xs.max() + margin_m), float(ys.max() + margin_m)


def positions_by_round(by_animal: dict, total_rounds: int) -> np.ndarray:
    """Linearly interpolated positions, shape ``(n_animals, total_rounds + 1, 2)``.

    Rounds before an animal's first sample or after its last are NaN.
    """
    out = np.full((len(by_animal), total_rounds + 1, 2), np.nan)
    t = np.arange(total_rounds + 1)
    for i, samples in enumerate(by_animal.values()):
        if not samples:
            continue
        rs = np.array([s.round for s in samples], dtype=float)
        xs = np.array([s.pos.x for s in samples])
        ys = np.array([s.pos.y for s in samples])
        live = (t >= rs[0]) & (t <= rs[-1])
        out[i, live, 0] = np.interp(t[live], rs, xs)
        out[i, live, 1] = np.interp(t[live], rs, ys)
    return out


@dataclass(frozen=True)
class Hotspot:
    center: GeoPoint
    stddev: float


def synthesize_hotspot_traces(
    seed: int,
    n_animals: int,
    hotspots: Sequence,
    dwell_mean: float,
    switch_prob: float,
    total_rounds: int,
    sample_interval: int,
    area: tuple | None = None,
) -> list:
    """Seeded synthetic traces of animals living around a few hotspots.

    Animal ``i`` starts at hotspot ``i mod len(hotspots)``.  After arriving at a hotspot it
    stays at least an exponentially distributed time with mean ``dwell_mean``
    rounds; past that, every sample switches to a different hotspot with
    probability ``switch_prob``.  Samples at a hotspot are isotropic Gaussian
    jitter whose RMS distance from the centre is ``stddev`` (per-axis sigma
    ``stddev / sqrt(2)``).  Switching animals walk the straight line to the new
    centre at :data:`MAX_ANIMAL_SPEED`.  ``area=(width, height)`` clips
    positions to the area.  Samples are at rounds ``0, interval, ...`` up to
    ``total_rounds`` and come out grouped by animal.
    """
    hs = [h if isinstance(h, Hotspot) else Hotspot(GeoPoint(*h[0]), float(h[1])) for h in hotspots]
    if not hs:
        raise ConfigError("at least one hotspot is required")
    if n_animals < 0 or sample_interval < 1 or total_rounds < 0:
        raise ConfigError("n_animals >= 0, sample_interval >= 1 and total_rounds >= 0 required")
    if not 0.0 <= switch_prob <= 1.0:
        raise ConfigError(f"switch_prob must be in [0, 1], got {switch_prob}")
    rng = np.random.default_rng(seed)
    rounds = range(0, total_rounds + 1, sample_interval)
    step_len = MAX_ANIMAL_SPEED * sample_interval

    out = []
    for a in range(n_animals):
        aid = f"a{a}"
        home = a % len(hs)
        settle_until = rng.exponential(dwell_mean) if dwell_mean > 0 else 0.0
        pos = None
        transit_to = None
        for rnd in rounds:
            if (
                transit_to is None
                and pos is not None
                and len(hs) > 1
                and rnd >= settle_until
                and rng.random() < switch_prob
            ):
                other = int(rng.integers(len(hs) - 1))
                transit_to = other if other < home else other + 1
            if transit_to is not None:
                tgt = hs[transit_to].center
                dx, dy = tgt.x - pos[0], tgt.y - pos[1]
                dist = math.hypot(dx, dy)
                if dist <= step_len:
                    home, transit_to = transit_to, None
                    settle_until = rnd + (rng.exponential(dwell_mean) if dwell_mean > 0 else 0.0)
                else:
                    pos = (pos[0] + dx / dist * step_len, pos[1] + dy / dist * step_len)
            if transit_to is None:
                h = hs[home]
                if h.stddev > 0:
                    jx, jy = rng.normal(0.0, h.stddev / math.sqrt(2.0), size=2)
                else:
                    jx = jy = 0.0
                pos = (h.center.x + float(jx), h.center.y + float(jy))
            x, y = pos
            if area is not None:
                x = min(max(x, 0.0), float(area[0]))
                y = min(max(y, 0.0), float(area[1]))
            out.append(TraceSample(aid, rnd, GeoPoint(x, y)))
    return out
