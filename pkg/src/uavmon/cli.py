"""``uavmon`` command line: run, sweep and gen."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import metrics
from .config import ExperimentSpec, dump_config, load_config
from .engine import run_many
from .errors import ConfigError, DataError, UavmonError
from .presets import SyntheticDataset
from .traces import read_traces, write_traces

log = logging.getLogger("uavmon")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _resolve_dataset(spec: ExperimentSpec):
    if isinstance(spec.dataset, SyntheticDataset):
        return spec.dataset
    return read_traces(spec.dataset)


def _apply_overrides(spec: ExperimentSpec, args) -> ExperimentSpec:
    sim = spec.sim
    if args.seed is not None:
        sim = replace(sim, base_seed=args.seed)
    out = Path(args.out) if args.out else spec.output_dir
    return replace(spec, sim=sim, output_dir=out)


def _print_table(rows):
    def num(v, fmt):
        return "-" if v is None else format(v, fmt)

    print(f"{'policy':<8} {'final VoI':>10} {'+/-':>8} {'med delay':>9} {'q3':>7} {'encounters':>10} {'+/-':>7}")
    for r in rows:
        print(
            f"{r['policy']:<8} {r['mean_final_voi']:>10.1f} {r['stddev']:>8.1f} "
            f"{num(r['median_delay'], '>9.1f')} {num(r['q3'], '>7.1f')} "
            f"{r['encounters_mean']:>10.1f} {r['encounters_std']:>7.1f}"
        )


def cmd_run(spec: ExperimentSpec, workers: int = 1, q_dump_every: int = 0) -> int:
    """Every listed policy on the same per-seed event stream; writes all CSV artefacts."""
    dataset = _resolve_dataset(spec)
    out = spec.output_dir
    summaries, curves = [], {}
    for pcfg in spec.policies:
        cfg = replace(spec.sim, policy=pcfg)
        results = run_many(cfg, dataset, workers=workers, q_dump_every=q_dump_every)
        for r in results:
            metrics.write_run_files(r, out / "runs" / pcfg.kind)
        summaries.append(metrics.policy_summary(pcfg.kind, results))
        curves[pcfg.kind] = metrics.mean_voi_curve(results)
    order = sorted(range(len(summaries)), key=lambda i: (-summaries[i]["mean_final_voi"], i))
    summaries = [summaries[i] for i in order]
    metrics.write_text(out / "summary.csv", metrics.summary_csv(summaries))
    metrics.write_text(out / "voi_curve.csv", metrics.voi_curve_csv(curves))
    metrics.write_text(out / "config.ini", dump_config(spec, include_output=False))
    _print_table(summaries)
    return 0


def cmd_sweep(spec: ExperimentSpec, axis: str, values, workers: int = 1) -> int:
    dataset = _resolve_dataset(spec)
    pcfg = next((p for p in spec.policies if p.kind == "mdp"), spec.policies[0])
    rows = metrics.sweep(replace(spec.sim, policy=pcfg), axis, values, dataset, workers=workers)
    metrics.write_text(spec.output_dir / "sweep.csv", metrics.sweep_csv(rows))
    metrics.write_text(spec.output_dir / "config.ini", dump_config(spec, include_output=False))
    print(f"{axis:>8} {'final VoI':>10} {'+/-':>8}")
    for r in rows:
        print(f"{r.value:>8g} {r.mean_final_voi:>10.1f} {r.stddev_final_voi:>8.1f}")
    return 0


def place_hotspots(seed: int, n: int, area, stddev: float) -> tuple:
    """``n`` hotspot centres drawn uniformly from the middle 70% of the area."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x407]))
    w, h = area
    xs = rng.uniform(0.15 * w, 0.85 * w, n)
    ys = rng.uniform(0.15 * h, 0.85 * h, n)
    return tuple(((float(x), float(y)), stddev) for x, y in zip(xs, ys))


def cmd_gen(args) -> int:
    if args.config:
        spec = load_config(args.config)
        if not isinstance(spec.dataset, SyntheticDataset):
            raise ConfigError(f"{args.config}: gen needs a synthetic dataset section")
        ds = spec.dataset
    else:
        ds = SyntheticDataset()
    area = tuple(float(v) for v in args.area.split(",")) if args.area else ds.area
    if len(area) != 2:
        raise ConfigError("--area expects WIDTH,HEIGHT")
    if args.hotspots is not None and args.hotspots < 1:
        raise ConfigError("--hotspots must be >= 1")
    hotspots = ds.hotspots
    if args.stddev is not None:
        hotspots = tuple((c, args.stddev) for c, _ in hotspots)
    if args.hotspots is not None and (args.hotspots != len(hotspots) or args.area):
        sd = args.stddev if args.stddev is not None else hotspots[0][1]
        hotspots = place_hotspots(args.seed, args.hotspots, area, sd)
    ds = replace(
        ds,
        n_animals=ds.n_animals if args.animals is None else args.animals,
        hotspots=hotspots,
        total_rounds=ds.total_rounds if args.rounds is None else args.rounds,
        sample_interval=ds.sample_interval if args.interval is None else args.interval,
        switch_prob=ds.switch_prob if args.switch_prob is None else args.switch_prob,
        dwell_mean=ds.dwell_mean if args.dwell_mean is None else args.dwell_mean,
        area=area,
    )
    samples = ds(args.seed)
    try:
        write_traces(samples, args.out)
    except OSError as exc:
        raise DataError(f"cannot write {args.out}: {exc}") from None
    print(f"wrote {len(samples)} samples for {ds.n_animals} animals to {args.out}")
    return 0


def _values(text: str) -> list:
    out = []
    for v in text.split(","):
        v = v.strip()
        if not v:
            continue
        try:
            f = float(v)
        except ValueError:
            raise ConfigError(f"--values: cannot parse {v!r}") from None
        out.append(int(f) if f.is_integer() and "." not in v else f)
    if not out:
        raise ConfigError("--values: at least one value required")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="uavmon", description="UAV data collection over a gridded wildlife sensor network")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", required=True, help="INI file or packaged preset name")
        sp.add_argument("--seed", type=int, help="override sim.base_seed")
        sp.add_argument("--out", help="output directory (default: output.dir)")
        sp.add_argument("--workers", type=int, default=1)

    r = sub.add_parser("run", help="compare the configured policies")
    common(r)
    r.add_argument("--q-dump-every", type=int, default=0, metavar="N", help="snapshot the MDP Q-table every N rounds")

    s = sub.add_parser("sweep", help="sweep epsilon or grid size for the MDP policy")
    common(s)
    s.add_argument("--axis", required=True, choices=metrics.SWEEP_AXES)
    s.add_argument("--values", required=True, help="comma-separated values")

    g = sub.add_parser("gen", help="write a synthetic hotspot trace CSV")
    g.add_argument("--config", help="take dataset parameters from this INI/preset")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--animals", type=int)
    g.add_argument("--hotspots", type=int)
    g.add_argument("--rounds", type=int)
    g.add_argument("--interval", type=int)
    g.add_argument("--stddev", type=float)
    g.add_argument("--switch-prob", type=float)
    g.add_argument("--dwell-mean", type=float)
    g.add_argument("--area", help="WIDTH,HEIGHT in metres")
    g.add_argument("--out", required=True)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
        if args.command == "gen":
            return cmd_gen(args)
        spec = _apply_overrides(load_config(args.config), args)
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        if args.command == "run":
            return cmd_run(spec, workers=args.workers, q_dump_every=args.q_dump_every)
        return cmd_sweep(spec, args.axis, _values(args.values), workers=args.workers)
    except UavmonError as exc:
        print(f"uavmon: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
