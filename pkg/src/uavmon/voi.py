"""Initial-reward factors and exponentially decaying value of information."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .errors import ConfigError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class VoiParams:
    """Decay law ``voi(t) = A * exp(-B t)``; ``A`` defaults to the initial reward."""

    A: float = 10.0
    B: float = 0.02

    def __post_init__(self):
        if not self.A > 0:
            raise ConfigError(f"voi.A must be > 0, got {self.A}")
        if not self.B >= 0:
            raise ConfigError(f"voi.B must be >= 0, got {self.B}")


@dataclass(frozen=True)
class InitialRewardParams:
    sigma: float = 10.0
    lam: float = 1.0
    W: float = 1.0
    alpha: float = 1.0
    A_est: float = 1.0
    T: float = 1.0
    T_max: float = 1.0

    def __post_init__(self):
        credibility(self.lam, self.W)
        distance_factor(self.alpha, self.A_est)
        if not self.T > 0:
            raise ConfigError(f"initial_reward.T must be > 0, got {self.T}")
        if not self.T_max > 0:
            raise ConfigError(f"initial_reward.T_max must be > 0, got {self.T_max}")
        if self.sigma < 0:
            raise ConfigError(f"initial_reward.sigma must be >= 0, got {self.sigma}")


def credibility(lam: float, W: float) -> float:
    c = lam * W
    if not 0.0 <= c <= 1.0:
        raise ConfigError(f"credibility lambda*W = {c} outside [0, 1]")
    return c


def distance_factor(alpha: float, A_est: float) -> float:
    if not A_est > 0:
        raise ConfigError(f"estimated area must be > 0, got {A_est}")
    return alpha / A_est


def duration_factor(T: float, T_max: float) -> float:
    """``T / T_max``, clamped to 1 when the event outlasts the cap."""
    if not T > 0:
        raise ConfigError(f"event duration must be > 0, got {T}")
    if not T_max > 0:
        raise ConfigError(f"duration cap must be > 0, got {T_max}")
    if T > T_max:
        log.warning("event duration %s exceeds cap %s; clamping factor to 1.0", T, T_max)
        return 1.0
    return T / T_max


def initial_reward(p: InitialRewardParams) -> float:
    return (
        p.sigma
        * credibility(p.lam, p.W)
        * distance_factor(p.alpha, p.A_est)
        * duration_factor(p.T, p.T_max)
    )


def voi_at(ir: float, B: float, t: float) -> float:
    """Value of an event with initial reward ``ir`` collected ``t`` rounds after creation."""
    if t < 0:
        raise ValueError(f"collection delay must be >= 0, got {t}")
    return ir * math.exp(-B * t)
