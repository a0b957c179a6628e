"""INI experiment files: one section per component, unknown keys rejected."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .engine import SimConfig
from .errors import ConfigError
from .policies import POLICY_KINDS, PolicyConfig
from .presets import SyntheticDataset
from .traces import GridSpec
from .voi import InitialRewardParams, VoiParams

# section -> key -> converter
_SCHEMA = {
    "grid": {
        "area_width": float,
        "area_height": float,
        "rows": int,
        "cols": int,
    },
    "policy": {
        "kinds": str,
        "epsilon": float,
        "gamma": float,
        "r_negative": float,
        "rng_seed": int,
    },
    "voi": {"a": float, "b": float},
    "initial_reward": {
        "sigma": float,
        "lambda": float,
        "w": float,
        "alpha": float,
        "a_est": float,
        "t": float,
        "t_max": float,
    },
    "sim": {
        "uav_speed": float,
        "encounter_radius": float,
        "dwell_period": int,
        "total_rounds": int,
        "start_row": int,
        "start_col": int,
        "n_runs": int,
        "base_seed": int,
    },
    "dataset": {
        "source": str,
        "n_animals": int,
        "hotspots": str,
        "dwell_mean": float,
        "switch_prob": float,
        "sample_interval": int,
    },
    "output": {"dir": str},
}


@dataclass
class ExperimentSpec:
    dataset: object  # Path to a trace CSV or a SyntheticDataset
    policies: list
    sim: SimConfig
    output_dir: Path = Path("results")
    source: str = field(default="<defaults>", repr=False)


def parse_hotspots(text: str) -> tuple:
    """``"x:y:stddev; x:y:stddev"`` -> ``(((x, y), stddev), ...)``."""
    out = []
    for part in text.replace("\n", ";").split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            x, y, sd = (float(v) for v in part.split(":"))
        except ValueError:
            raise ConfigError(f"dataset.hotspots: cannot parse {part!r}, expected x:y:stddev") from None
        out.append(((x, y), sd))
    if not out:
        raise ConfigError("dataset.hotspots: at least one hotspot required")
    return tuple(out)


def format_hotspots(hotspots) -> str:
    return "; ".join(f"{x!r}:{y!r}:{sd!r}" for (x, y), sd in hotspots)


def _get(values: dict, section: str, key: str, default):
    raw = values.get(section, {}).get(key)
    if raw is None:
        return default
    conv = _SCHEMA[section][key]
    try:
        return conv(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}: cannot convert {raw!r} to {conv.__name__}") from None


def parse_config(text: str, source: str = "<string>", base_dir: Path | None = None) -> ExperimentSpec:
    """Build an :class:`ExperimentSpec` from INI text; missing keys take the defaults."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None

    values = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"{source}: unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"{source}: unknown key {section}.{key}")
        values[section] = dict(cp.items(section))

    d = SimConfig()
    try:
        grid = GridSpec(
            _get(values, "grid", "area_width", d.grid.area_width),
            _get(values, "grid", "area_height", d.grid.area_height),
            _get(values, "grid", "rows", d.grid.rows),
            _get(values, "grid", "cols", d.grid.cols),
        )
        kinds = [k.strip() for k in _get(values, "policy", "kinds", ",".join(POLICY_KINDS)).split(",") if k.strip()]
        if not kinds:
            raise ConfigError("policy.kinds: at least one policy required")
        base_policy = PolicyConfig(
            kind=kinds[0] if kinds[0] in POLICY_KINDS else "mdp",
            epsilon=_get(values, "policy", "epsilon", d.policy.epsilon),
            gamma=_get(values, "policy", "gamma", d.policy.gamma),
            r_negative=_get(values, "policy", "r_negative", d.policy.r_negative),
            rng_seed=_get(values, "policy", "rng_seed", d.policy.rng_seed),
        )
        policies = []
        for k in kinds:
            if k not in POLICY_KINDS:
                raise ConfigError(f"policy.kinds: unknown policy {k!r}; choose from {', '.join(POLICY_KINDS)}")
            policies.append(replace(base_policy, kind=k))
        voi = VoiParams(_get(values, "voi", "a", d.voi.A), _get(values, "voi", "b", d.voi.B))
        ir = InitialRewardParams(
            sigma=_get(values, "initial_reward", "sigma", d.ir.sigma),
            lam=_get(values, "initial_reward", "lambda", d.ir.lam),
            W=_get(values, "initial_reward", "w", d.ir.W),
            alpha=_get(values, "initial_reward", "alpha", d.ir.alpha),
            A_est=_get(values, "initial_reward", "a_est", d.ir.A_est),
            T=_get(values, "initial_reward", "t", d.ir.T),
            T_max=_get(values, "initial_reward", "t_max", d.ir.T_max),
        )
        row = _get(values, "sim", "start_row", None)
        col = _get(values, "sim", "start_col", None)
        if (row is None) != (col is None):
            raise ConfigError("sim.start_row and sim.start_col must be given together")
        sim = SimConfig(
            grid=grid,
            policy=policies[0],
            voi=voi,
            ir=ir,
            uav_speed=_get(values, "sim", "uav_speed", d.uav_speed),
            encounter_radius=_get(values, "sim", "encounter_radius", d.encounter_radius),
            dwell_period=_get(values, "sim", "dwell_period", d.dwell_period),
            total_rounds=_get(values, "sim", "total_rounds", d.total_rounds),
            start_cell=None if row is None else (row, col),
            n_runs=_get(values, "sim", "n_runs", d.n_runs),
            base_seed=_get(values, "sim", "base_seed", d.base_seed),
        )

        src = _get(values, "dataset", "source", "synthetic")
        if src == "synthetic":
            sd = SyntheticDataset()
            hs = values.get("dataset", {}).get("hotspots")
            dataset = SyntheticDataset(
                n_animals=_get(values, "dataset", "n_animals", sd.n_animals),
                hotspots=parse_hotspots(hs) if hs is not None else sd.hotspots,
                dwell_mean=_get(values, "dataset", "dwell_mean", sd.dwell_mean),
                switch_prob=_get(values, "dataset", "switch_prob", sd.switch_prob),
                sample_interval=_get(values, "dataset", "sample_interval", sd.sample_interval),
                total_rounds=sim.total_rounds,
                area=(grid.area_width, grid.area_height),
            )
        else:
            extra = set(values.get("dataset", {})) - {"source"}
            if extra:
                raise ConfigError(f"dataset.{sorted(extra)[0]}: only valid with source = synthetic")
            p = Path(src)
            if not p.is_absolute() and base_dir is not None:
                p = base_dir / p
            dataset = p
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None

    out = Path(_get(values, "output", "dir", "results"))
    return ExperimentSpec(dataset=dataset, policies=policies, sim=sim, output_dir=out, source=source)


def preset_names() -> list:
    return sorted(p.name[:-4] for p in resources.files("uavmon").joinpath("configs").iterdir() if p.name.endswith(".ini"))


def load_config(path) -> ExperimentSpec:
    """Load an INI file, or a packaged preset by name (e.g. ``hotspot``)."""
    p = Path(path)
    if p.is_file():
        try:
            text = p.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot read {p}: {exc}") from None
        return parse_config(text, source=str(p), base_dir=p.parent)
    name = str(path)
    if name in preset_names():
        text = resources.files("uavmon").joinpath("configs", f"{name}.ini").read_text(encoding="utf-8")
        return parse_config(text, source=f"preset:{name}")
    raise ConfigError(f"config file {path} not found (packaged presets: {', '.join(preset_names())})")


def dump_config(spec: ExperimentSpec, include_output: bool = True) -> str:
    """INI text that parses back to an equivalent spec.

    Result directories record their config with ``include_output=False`` so
    the bytes do not depend on where the results were written.
    """
    s = spec.sim
    lines = [
        "[grid]",
        f"area_width = {s.grid.area_width!r}",
        f"area_height = {s.grid.area_height!r}",
        f"rows = {s.grid.rows}",
        f"cols = {s.grid.cols}",
        "",
        "[policy]",
        f"kinds = {','.join(p.kind for p in spec.policies)}",
        f"epsilon = {s.policy.epsilon!r}",
        f"gamma = {s.policy.gamma!r}",
        f"r_negative = {s.policy.r_negative!r}",
        f"rng_seed = {s.policy.rng_seed}",
        "",
        "[voi]",
        f"A = {s.voi.A!r}",
        f"B = {s.voi.B!r}",
        "",
        "[initial_reward]",
        f"sigma = {s.ir.sigma!r}",
        f"lambda = {s.ir.lam!r}",
        f"W = {s.ir.W!r}",
        f"alpha = {s.ir.alpha!r}",
        f"A_est = {s.ir.A_est!r}",
        f"T = {s.ir.T!r}",
        f"T_max = {s.ir.T_max!r}",
        "",
        "[sim]",
        f"uav_speed = {s.uav_speed!r}",
        f"encounter_radius = {s.encounter_radius!r}",
        f"dwell_period = {s.dwell_period}",
        f"total_rounds = {s.total_rounds}",
    ]
    if s.start_cell is not None:
        lines += [f"start_row = {s.start_cell[0]}", f"start_col = {s.start_cell[1]}"]
    lines += [f"n_runs = {s.n_runs}", f"base_seed = {s.base_seed}", "", "[dataset]"]
    if isinstance(spec.dataset, SyntheticDataset):
        ds = spec.dataset
        lines += [
            "source = synthetic",
            f"n_animals = {ds.n_animals}",
            f"hotspots = {format_hotspots(ds.hotspots)}",
            f"dwell_mean = {ds.dwell_mean!r}",
            f"switch_prob = {ds.switch_prob!r}",
            f"sample_interval = {ds.sample_interval}",
        ]
    else:
        lines.append(f"source = {spec.dataset}")
    if include_output:
        lines += ["", "[output]", f"dir = {spec.output_dir}"]
    lines.append("")
    return "\n".join(lines)
