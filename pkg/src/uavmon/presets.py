"""Synthetic hotspot datasets and the stock experiment configurations."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .engine import SimConfig
from .policies import PolicyConfig
from .traces import GridSpec, synthesize_hotspot_traces


@dataclass(frozen=True)
class SyntheticDataset:
    """Picklable ``seed -> traces`` factory around :func:`synthesize_hotspot_traces`."""

    n_animals: int = 5
    hotspots: tuple = (((2020.0, 7995.0), 800.0), ((3120.0, 8195.0), 800.0))
    dwell_mean: float = 150.0
    switch_prob: float = 0.1
    sample_interval: int = 10
    total_rounds: int = 4000
    area: tuple = (10_000.0, 10_000.0)

    def __call__(self, seed: int) -> list:
        return synthesize_hotspot_traces(
            seed,
            self.n_animals,
            self.hotspots,
            self.dwell_mean,
            self.switch_prob,
            self.total_rounds,
            self.sample_interval,
            area=self.area,
        )


def hotspot_preset(**overrides) -> tuple:
    """The 10 km, 4 x 4, epsilon 0.2 hotspot experiment as ``(SimConfig, SyntheticDataset)``."""
    cfg = SimConfig(
        grid=GridSpec(10_000.0, 10_000.0, 4, 4),
        policy=PolicyConfig(kind="mdp", epsilon=0.2),
        total_rounds=4000,
        n_runs=10,
        base_seed=0,
    )
    data = SyntheticDataset(total_rounds=cfg.total_rounds, area=(cfg.grid.area_width, cfg.grid.area_height))
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg, data


def with_policy(cfg: SimConfig, kind: str, **kw) -> SimConfig:
    return replace(cfg, policy=replace(cfg.policy, kind=kind, **kw))
