"""Path planners: epsilon-greedy Q-learning, IR-greedy, fixed TSP tour and random."""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError, ContractViolation
from .kernels import held_karp
from .traces import GridSpec

POLICY_KINDS = ("mdp", "greedy", "tsp", "random")

# grids up to this many cells get an exact tour, larger ones a serpentine
EXACT_TSP_MAX_CELLS = 20


class Action(Enum):
    # (d_row, d_col); rows grow northwards, columns eastwards
    NORTH = (1, 0)
    EAST = (0, 1)
    SOUTH = (-1, 0)
    WEST = (0, -1)
    NORTHEAST = (1, 1)
    SOUTHEAST = (-1, 1)
    SOUTHWEST = (-1, -1)
    NORTHWEST = (1, -1)
    STAY = (0, 0)

    @property
    def index(self) -> int:
        return _ACTION_INDEX[self]

    def apply(self, cell) -> tuple:
        return cell[0] + self.value[0], cell[1] + self.value[1]

    @classmethod
    def between(cls, cell, target) -> "Action":
        delta = (target[0] - cell[0], target[1] - cell[1])
        try:
            return cls(delta)
        except ValueError:
            raise ContractViolation(f"{target} is not adjacent to {cell}") from None


ACTIONS = tuple(Action)
_ACTION_INDEX = {a: i for i, a in enumerate(ACTIONS)}


def valid_actions(grid: GridSpec, cell) -> list:
    """Actions whose target stays inside the grid, in :data:`ACTIONS` order."""
    return [a for a in ACTIONS if grid.contains(a.apply(cell))]


@dataclass(frozen=True)
class PolicyConfig:
    kind: str = "mdp"
    epsilon: float = 0.2
    gamma: float = 0.9
    r_negative: float = -1.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ConfigError(f"policy kind must be one of {POLICY_KINDS}, got {self.kind!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigError(f"gamma must be in [0, 1), got {self.gamma}")


@dataclass(frozen=True)
class PolicyObservation:
    arrived_cell: tuple
    collected_ir_sum: float = 0.0
    had_events: bool = False


def reward(obs: PolicyObservation, r_negative: float) -> float:
    return obs.collected_ir_sum if obs.had_events else r_negative


class QTable:
    """Q-values for every valid (cell, action) pair, initialised to zero."""

    def __init__(self, grid: GridSpec):
        self.grid = grid
        self.values = np.zeros((grid.rows, grid.cols, len(ACTIONS)))
        self.valid = np.zeros_like(self.values, dtype=bool)
        for cell in grid.cells():
            for a in valid_actions(grid, cell):
                self.valid[cell[0], cell[1], a.index] = True

    def _check(self, cell, action):
        if not (self.grid.contains(cell) and self.valid[cell[0], cell[1], action.index]):
            raise ContractViolation(f"invalid (cell, action) pair {cell}, {action.name}")

    def __getitem__(self, key) -> float:
        cell, action = key
        self._check(cell, action)
        return float(self.values[cell[0], cell[1], action.index])

    def __setitem__(self, key, value) -> None:
        cell, action = key
        self._check(cell, action)
        self.values[cell[0], cell[1], action.index] = value

    def actions(self, cell) -> list:
        return [a for a in ACTIONS if self.valid[cell[0], cell[1], a.index]]

    def max_value(self, cell) -> float:
        r, c = cell
        return float(self.values[r, c][self.valid[r, c]].max())

    def __len__(self) -> int:
        return int(self.valid.sum())

    def items(self):
        for r, c, i in zip(*np.nonzero(self.valid)):
            yield (int(r), int(c)), ACTIONS[i], float(self.values[r, c, i])

    def to_csv(self) -> str:
        lines = ["row,col,action,q_value"]
        for (r, c), a, v in self.items():
            lines.append(f"{r},{c},{a.name.lower()},{v!r}")
        return "\n".join(lines) + "\n"


def q_update(q: QTable, s, a: Action, r: float, s_next, gamma: float) -> QTable:
    """Deterministic-transition Q backup without a learning rate."""
    if a.apply(s) != tuple(s_next):
        raise ContractViolation(f"action {a.name} from {s} does not lead to {s_next}")
    q[s, a] = r + gamma * q.max_value(s_next)
    return q


def mdp_next_action(q: QTable, s, epsilon: float, rng: np.random.Generator) -> Action:
    """Epsilon-greedy choice; exact argmax ties are broken uniformly at random."""
    acts = q.actions(s)
    if rng.random() < epsilon:
        return acts[int(rng.integers(len(acts)))]
    vals = np.array([q.values[s[0], s[1], a.index] for a in acts])
    best = np.flatnonzero(vals == vals.max())
    if best.size == 1:
        return acts[int(best[0])]
    return acts[int(best[int(rng.integers(best.size))])]


def greedy_next_cell(ir_memory: np.ndarray, s, rng: np.random.Generator) -> Action:
    """Move to the neighbour (or stay) with the largest remembered IR sum."""
    rows, cols = ir_memory.shape
    acts = [a for a in ACTIONS if 0 <= a.apply(s)[0] < rows and 0 <= a.apply(s)[1] < cols]
    vals = np.array([ir_memory[a.apply(s)] for a in acts])
    best = np.flatnonzero(vals == vals.max())
    return acts[int(best[int(rng.integers(best.size))])]


def random_next_cell(grid: GridSpec, rng: np.random.Generator) -> tuple:
    k = int(rng.integers(grid.n_cells))
    return divmod(k, grid.cols)


def center_distance(grid: GridSpec, a, b) -> float:
    return math.hypot((a[0] - b[0]) * grid.cell_height, (a[1] - b[1]) * grid.cell_width)


def distance_matrix(grid: GridSpec, cells=None) -> np.ndarray:
    cells = grid.cells() if cells is None else cells
    rc = np.array(cells, dtype=float)
    dy = (rc[:, None, 0] - rc[None, :, 0]) * grid.cell_height
    dx = (rc[:, None, 1] - rc[None, :, 1]) * grid.cell_width
    return np.hypot(dx, dy)


def tour_length(grid: GridSpec, tour) -> float:
    """Closed-cycle length of ``tour``; exactly rounded so equal edge multisets compare equal."""
    n = len(tour)
    if n < 2:
        return 0.0
    return math.fsum(center_distance(grid, tour[i], tour[(i + 1) % n]) for i in range(n))


def serpentine_tour(grid: GridSpec) -> list:
    """Boustrophedon cycle: sweep rows in alternating directions, return along column 0.

    Column 0 is held back for the return leg, so the sweep covers columns
    ``1..cols-1``; with a single column this degenerates to an out-and-back.
    """
    if grid.cols == 1 or grid.rows == 1:
        return grid.cells()
    tour = [(0, 0)]
    for r in range(grid.rows):
        cols = range(1, grid.cols) if r % 2 == 0 else range(grid.cols - 1, 0, -1)
        tour.extend((r, c) for c in cols)
    tour.extend((r, 0) for r in range(grid.rows - 1, 0, -1))
    return tour


@functools.lru_cache(maxsize=64)
def _canonical_tour(rows: int, cols: int, w: float, h: float) -> tuple:
    grid = GridSpec(w, h, rows, cols)
    cells = grid.cells()
    if len(cells) > EXACT_TSP_MAX_CELLS:
        return tuple(serpentine_tour(grid))
    _, order = held_karp(distance_matrix(grid, cells))
    return tuple(cells[i] for i in order)


def tsp_tour(grid: GridSpec, start=None) -> list:
    """Shortest closed tour over all cell centres, rotated to begin at ``start``.

    Exact (Held-Karp) for grids of at most :data:`EXACT_TSP_MAX_CELLS` cells,
    serpentine beyond.  The direction of travel is fixed by taking the
    lexicographically smaller of the start cell's two tour neighbours first.
    """
    tour = list(_canonical_tour(grid.rows, grid.cols, grid.area_width, grid.area_height))
    start = tour[0] if start is None else tuple(start)
    i = tour.index(start)
    tour = tour[i:] + tour[:i]
    if len(tour) > 2 and tour[-1] < tour[1]:
        tour = [tour[0]] + tour[:0:-1]
    return tour


def brute_force_tsp_length(grid: GridSpec) -> float:
    """Optimal cycle length by enumerating every permutation (factorial time)."""
    cells = grid.cells()
    if len(cells) < 3:
        return tour_length(grid, cells)
    first, rest = cells[0], cells[1:]
    return min(tour_length(grid, [first, *p]) for p in itertools.permutations(rest))


class Policy:
    """Common planner interface.

    ``decide`` is called each time the UAV is ready at a cell centre, with the
    observation of what it just collected there, and returns the next target
    cell.  The first call (at the start cell) has no preceding move.
    """

    kind = ""

    def __init__(self, cfg: PolicyConfig, grid: GridSpec, rng: np.random.Generator):
        self.cfg = cfg
        self.grid = grid
        self.rng = rng

    def decide(self, cell, obs: PolicyObservation | None) -> tuple:
        raise NotImplementedError


class MdpPolicy(Policy):
    kind = "mdp"

    def __init__(self, cfg, grid, rng):
        super().__init__(cfg, grid, rng)
        self.q = QTable(grid)
        self._last = None

    def decide(self, cell, obs):
        if self._last is not None:
            s, a = self._last
            q_update(self.q, s, a, reward(obs, self.cfg.r_negative), cell, self.cfg.gamma)
        a = mdp_next_action(self.q, cell, self.cfg.epsilon, self.rng)
        self._last = (cell, a)
        return a.apply(cell)


class GreedyPolicy(Policy):
    kind = "greedy"

    def __init__(self, cfg, grid, rng):
        super().__init__(cfg, grid, rng)
        self.memory = np.zeros((grid.rows, grid.cols))

    def decide(self, cell, obs):
        # an empty visit overwrites whatever was remembered
        self.memory[cell] = obs.collected_ir_sum
        return greedy_next_cell(self.memory, cell, self.rng).apply(cell)


class TspPolicy(Policy):
    kind = "tsp"

    def __init__(self, cfg, grid, rng):
        super().__init__(cfg, grid, rng)
        self.tour = None
        self._pos = 0

    def decide(self, cell, obs):
        if self.tour is None:
            self.tour = tsp_tour(self.grid, cell)
        elif self.tour[self._pos] != tuple(cell):
            raise ContractViolation(f"TSP policy expected to be at {self.tour[self._pos]}, got {cell}")
        self._pos = (self._pos + 1) % len(self.tour)
        return self.tour[self._pos]


class RandomPolicy(Policy):
    kind = "random"

    def decide(self, cell, obs):
        return random_next_cell(self.grid, self.rng)


_POLICIES = {p.kind: p for p in (MdpPolicy, GreedyPolicy, TspPolicy, RandomPolicy)}


def make_policy(cfg: PolicyConfig, grid: GridSpec, rng: np.random.Generator) -> Policy:
    return _POLICIES[cfg.kind](cfg, grid, rng)
