"""Value-of-information driven UAV path planning over gridded wildlife sensor networks."""

from .engine import RunResult, SimConfig, run, run_many, travel_rounds
from .errors import AggregationError, ConfigError, ContractViolation, DataError, UavmonError
from .policies import Action, PolicyConfig, QTable
from .presets import SyntheticDataset, hotspot_preset, with_policy
from .traces import AnimalEvent, GeoPoint, GridSpec, TraceSample, cell_of, generate_events
from .voi import InitialRewardParams, VoiParams, initial_reward, voi_at

__version__ = "0.1.0"
