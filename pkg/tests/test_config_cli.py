import csv
import hashlib
import subprocess
import sys
from pathlib import Path

import pytest

from uavmon.cli import main
from uavmon.config import dump_config, load_config, parse_config, parse_hotspots, preset_names
from uavmon.errors import ConfigError
from uavmon.policies import POLICY_KINDS
from uavmon.presets import SyntheticDataset, hotspot_preset
from uavmon.voi import InitialRewardParams, VoiParams

MINIMAL = """\
[grid]
area_width = 1000
area_height = 1000
rows = 1
cols = 1

[sim]
total_rounds = 10
n_runs = 2

[dataset]
n_animals = 2
hotspots = 500:500:100
"""


def _write(tmp_path, text=MINIMAL, name="exp.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def _tree(d: Path) -> dict:
    return {str(p.relative_to(d)): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}


class TestConfig:
    def test_defaults(self):
        spec = parse_config("")
        assert spec.sim.voi == VoiParams(10.0, 0.02)
        assert spec.sim.ir == InitialRewardParams()
        assert spec.sim.policy.r_negative == -1.0
        assert spec.sim.encounter_radius == 200.0 and spec.sim.uav_speed == 1000.0
        assert [p.kind for p in spec.policies] == list(POLICY_KINDS)
        assert spec.sim.grid.area_width == 10_000.0

    @pytest.mark.parametrize("preset", ["hotspot", "hotspot_100km"])
    def test_round_trip(self, preset):
        spec = load_config(preset)
        again = parse_config(dump_config(spec))
        assert again.sim == spec.sim and again.dataset == spec.dataset and again.policies == spec.policies
        assert dump_config(again) == dump_config(spec)

    def test_round_trip_with_start(self):
        spec = parse_config("[sim]\nstart_row = 1\nstart_col = 2\n[policy]\nkinds = tsp\n")
        assert parse_config(dump_config(spec)).sim.start == (1, 2)

    def test_packaged_presets(self):
        assert preset_names() == ["hotspot", "hotspot_100km"]
        cfg, data = hotspot_preset()
        spec = load_config("hotspot")
        assert spec.sim == cfg and spec.dataset == data
        assert load_config("hotspot_100km").sim.grid.area_width == 100_000.0

    @pytest.mark.parametrize(
        "text,match",
        [
            ("[grid]\nrowz = 3\n", "unknown key"),
            ("[gird]\nrows = 3\n", "unknown section"),
            ("[grid]\nrows = three\n", "grid.rows"),
            ("[policy]\nkinds = mdp,ants\n", "ants"),
            ("[policy]\nepsilon = 2\n", "epsilon"),
            ("[sim]\nstart_row = 1\n", "together"),
            ("[dataset]\nsource = x.csv\nn_animals = 3\n", "synthetic"),
            ("[initial_reward]\nlambda = 1.5\n", "lambda"),
        ],
    )
    def test_rejects(self, text, match):
        with pytest.raises(ConfigError, match=match):
            parse_config(text)

    def test_hotspot_syntax(self):
        assert parse_hotspots("1:2:3; 4:5:6") == (((1.0, 2.0), 3.0), ((4.0, 5.0), 6.0))
        with pytest.raises(ConfigError):
            parse_hotspots("1:2")

    def test_relative_trace_path(self, tmp_path):
        p = _write(tmp_path, "[dataset]\nsource = traces.csv\n")
        assert load_config(p).dataset == tmp_path / "traces.csv"

    def test_missing(self):
        with pytest.raises(ConfigError, match="not found"):
            load_config("no_such_file.ini")


class TestRun:
    def test_smoke(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["run", "--config", str(_write(tmp_path)), "--out", str(out)]) == 0
        for name in ("summary.csv", "voi_curve.csv", "config.ini"):
            assert (out / name).is_file()
        for kind in POLICY_KINDS:
            for seed in (0, 1):
                for suffix in ("voi", "events", "encounters"):
                    assert (out / "runs" / kind / f"seed{seed}_{suffix}.csv").is_file()
        assert (out / "runs" / "mdp" / "seed0_qtable.csv").is_file()
        with open(out / "voi_curve.csv") as f:
            rows = list(csv.reader(f))
        assert len(rows) == 1 + 11
        assert "policy" in capsys.readouterr().out

    def test_seed_override_deterministic(self, tmp_path):
        cfg = str(_write(tmp_path))
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--config", cfg, "--seed", "7", "--out", str(a)]) == 0
        assert main(["run", "--config", cfg, "--seed", "7", "--out", str(b)]) == 0
        ta, tb = _tree(a), _tree(b)
        assert ta == tb and "runs/mdp/seed7_voi.csv" in ta

    def test_written_config_reproduces(self, tmp_path):
        cfg = str(_write(tmp_path))
        a, b = tmp_path / "a", tmp_path / "b"
        main(["run", "--config", cfg, "--out", str(a)])
        main(["run", "--config", str(a / "config.ini"), "--out", str(b)])
        assert (a / "summary.csv").read_bytes() == (b / "summary.csv").read_bytes()

    def test_q_dump(self, tmp_path):
        out = tmp_path / "o"
        main(["run", "--config", str(_write(tmp_path)), "--out", str(out), "--q-dump-every", "5"])
        assert sorted(p.name for p in (out / "runs/mdp/qtables").iterdir()) == [
            "seed0_round0.csv", "seed0_round10.csv", "seed0_round5.csv",
            "seed1_round0.csv", "seed1_round10.csv", "seed1_round5.csv",
        ]

    def test_trace_file_source(self, tmp_path):
        traces = tmp_path / "t.csv"
        traces.write_text("animal_id,round,x_m,y_m\na,0,10,10\na,10,900,900\n")
        cfg = _write(tmp_path, MINIMAL.split("[dataset]")[0] + "[dataset]\nsource = t.csv\n")
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0


class TestSweep:
    def test_epsilon_rows(self, tmp_path):
        out = tmp_path / "s"
        rc = main(["sweep", "--config", str(_write(tmp_path)), "--axis", "epsilon",
                   "--values", "0,0.2,0.4,0.6,0.8,1.0", "--out", str(out)])
        assert rc == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[0] == "axis_value,mean_final_voi,stddev" and len(lines) == 7

    def test_grid_rows(self, tmp_path):
        out = tmp_path / "s"
        main(["sweep", "--config", str(_write(tmp_path)), "--axis", "grid", "--values", "2,3,4,5,6", "--out", str(out)])
        assert len((out / "sweep.csv").read_text().splitlines()) == 6

    def test_single_value_matches_run(self, tmp_path):
        cfg = str(_write(tmp_path))
        main(["run", "--config", cfg, "--out", str(tmp_path / "r")])
        main(["sweep", "--config", cfg, "--axis", "epsilon", "--values", "0.2", "--out", str(tmp_path / "s")])
        with open(tmp_path / "r/summary.csv") as f:
            mdp = next(r for r in csv.DictReader(f) if r["policy"] == "mdp")
        with open(tmp_path / "s/sweep.csv") as f:
            [row] = list(csv.DictReader(f))
        assert row["mean_final_voi"] == mdp["mean_final_voi"] and row["stddev"] == mdp["stddev"]


class TestGen:
    def test_default_header(self, tmp_path):
        out = tmp_path / "t.csv"
        assert main(["gen", "--out", str(out)]) == 0
        assert out.read_text().splitlines()[0] == "animal_id,round,x_m,y_m"

    def test_same_seed_same_hash(self, tmp_path):
        h = []
        for name in ("a.csv", "b.csv"):
            main(["gen", "--seed", "3", "--animals", "4", "--hotspots", "3", "--rounds", "300", "--out", str(tmp_path / name)])
            h.append(hashlib.sha256((tmp_path / name).read_bytes()).hexdigest())
        assert h[0] == h[1]

    def test_record_count(self, tmp_path):
        out = tmp_path / "t.csv"
        main(["gen", "--animals", "5", "--rounds", "1000", "--interval", "10", "--out", str(out)])
        assert len(out.read_text().splitlines()) == 1 + 5 * 101

    def test_hotspot_count(self, tmp_path):
        out = tmp_path / "t.csv"
        main(["gen", "--hotspots", "4", "--animals", "8", "--switch-prob", "0", "--stddev", "1", "--out", str(out)])
        with open(out) as f:
            firsts = {}
            for r in csv.DictReader(f):
                firsts.setdefault(r["animal_id"], (float(r["x_m"]), float(r["y_m"])))
        centres = []
        for p in firsts.values():
            if all(abs(p[0] - c[0]) + abs(p[1] - c[1]) > 50 for c in centres):
                centres.append(p)
        assert len(centres) == 4

    def test_from_config(self, tmp_path):
        out = tmp_path / "t.csv"
        assert main(["gen", "--config", "hotspot", "--rounds", "100", "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 1 + 5 * 11


class TestExitCodes:
    def test_config_error(self, tmp_path, capsys):
        assert main(["run", "--config", str(_write(tmp_path, "[grid]\nrows = -1\n"))]) == 1
        assert "row" in capsys.readouterr().err

    def test_bad_flag(self):
        assert main(["run", "--config", "hotspot", "--bogus"]) == 1
        assert main(["sweep", "--config", "hotspot", "--axis", "gamma", "--values", "1"]) == 1
        assert main(["sweep", "--config", "hotspot", "--axis", "epsilon", "--values", "x"]) == 1

    def test_data_error(self, tmp_path, capsys):
        (tmp_path / "t.csv").write_text("animal_id,round,x_m,y_m\na,0,10,10\na,5,nan?,1\n")
        cfg = _write(tmp_path, MINIMAL.split("[dataset]")[0] + "[dataset]\nsource = t.csv\n")
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
        assert "t.csv:3" in capsys.readouterr().err

    def test_out_of_area_trace(self, tmp_path, capsys):
        (tmp_path / "t.csv").write_text("animal_id,round,x_m,y_m\na,0,10,10\na,5,5000,1\n")
        cfg = _write(tmp_path, MINIMAL.split("[dataset]")[0] + "[dataset]\nsource = t.csv\n")
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
        assert "round 5" in capsys.readouterr().err

    def test_unwritable_gen(self, tmp_path):
        (tmp_path / "f").write_text("")
        assert main(["gen", "--rounds", "10", "--out", str(tmp_path / "f" / "x.csv")]) == 2

    def test_module_entry_point(self, tmp_path):
        bad = _write(tmp_path, "[nope]\n")
        p = subprocess.run([sys.executable, "-m", "uavmon", "run", "--config", str(bad)], capture_output=True, text=True)
        assert p.returncode == 1 and "unknown section" in p.stderr
