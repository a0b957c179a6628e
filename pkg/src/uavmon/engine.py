"""Round-based simulation of one UAV collecting buffered events from grid cells."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, ContractViolation
from .kernels import encounter_episodes
from .policies import PolicyConfig, PolicyObservation, POLICY_KINDS, make_policy
from .traces import (
    AnimalEvent,
    GeoPoint,
    GridSpec,
    generate_events,
    group_by_animal,
    positions_by_round,
    validate_traces,
)
from .voi import InitialRewardParams, VoiParams, voi_at


@dataclass(frozen=True)
class SimConfig:
    grid: GridSpec = field(default_factory=lambda: GridSpec(10_000.0, 10_000.0, 4, 4))
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    voi: VoiParams = field(default_factory=VoiParams)
    ir: InitialRewardParams = field(default_factory=InitialRewardParams)
    uav_speed: float = 1000.0
    encounter_radius: float = 200.0
    dwell_period: int = 60
    total_rounds: int = 4000
    start_cell: tuple | None = None
    n_runs: int = 10
    base_seed: int = 0

    def __post_init__(self):
        if not self.uav_speed > 0:
            raise ConfigError(f"uav_speed must be > 0, got {self.uav_speed}")
        if self.encounter_radius < 0:
            raise ConfigError(f"encounter_radius must be >= 0, got {self.encounter_radius}")
        if self.dwell_period < 1:
            raise ConfigError(f"dwell_period must be >= 1, got {self.dwell_period}")
        if self.total_rounds < 1:
            raise ConfigError(f"total_rounds must be >= 1, got {self.total_rounds}")
        if self.n_runs < 1:
            raise ConfigError(f"n_runs must be >= 1, got {self.n_runs}")
        if self.start_cell is not None and not self.grid.contains(self.start_cell):
            raise ConfigError(f"start_cell {self.start_cell} outside the grid")

    @property
    def start(self) -> tuple:
        """Configured start cell, defaulting to the north-west (top-left) corner."""
        if self.start_cell is None:
            return self.grid.rows - 1, 0
        return tuple(self.start_cell)


@dataclass
class UavState:
    pos: GeoPoint
    cell: tuple
    target_cell: tuple | None = None
    rounds_to_arrival: int = 0


@dataclass
class RunResult:
    policy: str
    seed: int
    voi_timeline: np.ndarray
    delays: np.ndarray
    encounters: int
    uncollected_count: int
    events: list = field(default_factory=list)
    event_voi: dict = field(default_factory=dict)
    episodes: list = field(default_factory=list)
    q_table: str | None = None
    q_snapshots: dict = field(default_factory=dict)

    @property
    def final_voi(self) -> float:
        return float(self.voi_timeline[-1])


def travel_rounds(from_cell, to_cell, grid: GridSpec, uav_speed: float) -> int:
    """Rounds to fly centre to centre; 0 for the same cell (the engine charges a stay 1 round)."""
    if tuple(from_cell) == tuple(to_cell):
        return 0
    d = math.hypot(
        (to_cell[0] - from_cell[0]) * grid.cell_height,
        (to_cell[1] - from_cell[1]) * grid.cell_width,
    )
    return int(math.ceil(d / uav_speed))


def detect_encounters(uav_xy, animal_xy, radius: float, animal_ids=None) -> list:
    """Encounter episodes as ``(animal_id, open_round, close_round)``; ``close_round`` is
    ``None`` for an episode still open at the end of the run."""
    rows = encounter_episodes(uav_xy, animal_xy, radius)
    out = []
    for a, t0, t1 in rows.tolist():
        aid = animal_ids[a] if animal_ids is not None else a
        out.append((aid, t0, None if t1 < 0 else t1))
    return out


def _policy_rng(seed: int, cfg: PolicyConfig) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, cfg.rng_seed, POLICY_KINDS.index(cfg.kind)]))


def run(config: SimConfig, traces, events=None, seed=None, q_dump_every: int = 0) -> RunResult:
    """Simulate rounds ``0..total_rounds`` and return the collected statistics.

    Each round: new events enter their cell buffers, the UAV advances
    ``uav_speed`` metres toward its target, and on arrival it empties the cell
    buffer, scores every event by its decayed value and asks the policy for
    the next target.  Encounters are scored from the per-round UAV positions
    against linearly interpolated animal positions.
    """
    grid = config.grid
    seed = config.base_seed if seed is None else seed
    by_animal = traces if isinstance(traces, dict) else group_by_animal(traces)
    validate_traces([s for lst in by_animal.values() for s in lst], grid)
    if events is None:
        events = generate_events(by_animal, grid, config.dwell_period, config.ir)
    else:
        events = [replace(e, collected_round=None) for e in events]
    events = [e for e in events if e.created_round <= config.total_rounds]
    events.sort(key=lambda e: (e.created_round, e.event_id))

    policy = make_policy(config.policy, grid, _policy_rng(seed, config.policy))
    B = config.voi.B
    T = config.total_rounds

    start = config.start
    uav = UavState(pos=grid.center(start), cell=start)
    buffers: dict = {}
    timeline = np.empty(T + 1)
    uav_xy = np.empty((T + 1, 2))
    delays = []
    event_voi = {}
    snapshots = {}
    cum = 0.0
    nxt = 0

    for rnd in range(T + 1):
        while nxt < len(events) and events[nxt].created_round <= rnd:
            ev = events[nxt]
            buffers.setdefault(ev.cell, []).append(ev)
            nxt += 1

        if uav.rounds_to_arrival > 0:
            tgt = grid.center(uav.target_cell)
            uav.rounds_to_arrival -= 1
            if uav.rounds_to_arrival == 0:
                uav.pos, uav.cell, uav.target_cell = tgt, uav.target_cell, None
            else:
                dx, dy = tgt.x - uav.pos.x, tgt.y - uav.pos.y
                d = math.hypot(dx, dy)
                step = min(config.uav_speed, d)
                uav.pos = GeoPoint(uav.pos.x + dx / d * step, uav.pos.y + dy / d * step) if d > 0 else tgt

        if uav.rounds_to_arrival == 0:
            ir_sum = 0.0
            for ev in buffers.pop(uav.cell, ()):
                if ev.collected_round is not None:
                    raise ContractViolation(f"event {ev.event_id} collected twice")
                ev.collected_round = rnd
                delay = rnd - ev.created_round
                v = voi_at(ev.initial_reward, B, delay)
                cum += v
                ir_sum += ev.initial_reward
                delays.append(delay)
                event_voi[ev.event_id] = v
            obs = PolicyObservation(uav.cell, ir_sum, ir_sum > 0)
            target = tuple(policy.decide(uav.cell, obs))
            if not grid.contains(target):
                raise ContractViolation(f"{policy.kind} policy chose {target} outside the grid at round {rnd}")
            uav.target_cell = target
            uav.rounds_to_arrival = max(1, travel_rounds(uav.cell, target, grid, config.uav_speed))

        if q_dump_every and policy.kind == "mdp" and rnd % q_dump_every == 0:
            snapshots[rnd] = policy.q.to_csv()
        uav_xy[rnd] = uav.pos
        timeline[rnd] = cum

    animal_xy = positions_by_round(by_animal, T)
    episodes = detect_encounters(uav_xy, animal_xy, config.encounter_radius, list(by_animal))

    return RunResult(
        policy=policy.kind,
        seed=seed,
        voi_timeline=timeline,
        delays=np.asarray(delays, dtype=np.int64),
        encounters=len(episodes),
        uncollected_count=sum(1 for e in events if e.collected_round is None),
        events=events,
        event_voi=event_voi,
        episodes=episodes,
        q_table=policy.q.to_csv() if policy.kind == "mdp" else None,
        q_snapshots=snapshots,
    )


def _run_job(args):
    config, dataset, seed, q_dump_every = args
    traces = dataset(seed) if callable(dataset) else dataset
    return run(config, traces, seed=seed, q_dump_every=q_dump_every)


def run_many(config: SimConfig, dataset, workers: int = 1, q_dump_every: int = 0) -> list:
    """``n_runs`` independent runs with seeds ``base_seed + i``, in seed order.

    ``dataset`` is a trace list shared by all runs or a picklable callable
    mapping a run seed to traces (e.g. :class:`uavmon.presets.SyntheticDataset`).
    """
    jobs = [(config, dataset, config.base_seed + i, q_dump_every) for i in range(config.n_runs)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_job, jobs))
    return [_run_job(j) for j in jobs]


