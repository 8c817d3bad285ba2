import json
import math

import numpy as np
import pytest

from rdlab._rng import splitmix64, trial_seed
from rdlab.cli import main
from rdlab.harness import ConfigError, ExperimentConfig, load_config, run
from rdlab.sampler import from_edge_list
from rdlab.weights import RADEMACHER, REAL_GAUSSIAN


def write_config(tmp_path, text):
    p = tmp_path / "config.toml"
    p.write_text(text)
    return p


class TestConfig:
    def test_d_from_p(self):
        cfg = ExperimentConfig("esd", n=10, p=0.45)
        assert cfg.d == 4

    def test_inconsistent_d_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig("esd", n=10, p=0.5, d=3)

    def test_unknown_experiment(self):
        with pytest.raises(ConfigError):
            ExperimentConfig("mystery", n=10)

    def test_digest_stable_and_sensitive(self):
        a = ExperimentConfig("esd", n=10, d=3)
        b = ExperimentConfig("esd", n=10, d=3)
        c = ExperimentConfig("esd", n=10, d=3, seed=1)
        assert a.digest() == b.digest()
        assert a.digest() != c.digest()

    def test_load_toml_with_overrides(self, tmp_path):
        p = write_config(
            tmp_path,
            'experiment = "logpot"\nn = 20\np = 0.5\nweight_law = "rademacher"\n'
            "z_re = 2.0\ntrials = 2\nseed = 7\n",
        )
        cfg = load_config(p, {"seed": 9, "n": None})
        assert cfg.experiment == "logpot"
        assert cfg.n == 20 and cfg.seed == 9
        assert cfg.z == 2.0 + 0j
        assert cfg.weight_law == RADEMACHER

    def test_extra_keys_become_params(self, tmp_path):
        p = write_config(
            tmp_path, 'experiment = "wegner"\nn = 50\np = 0.5\nalpha = 0.6\n'
        )
        cfg = load_config(p)
        assert cfg.params == {"alpha": 0.6}

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.toml")


class TestTrialSeeds:
    def test_splitmix_derivation(self):
        assert trial_seed(5, 3) == splitmix64(5 ^ splitmix64(3))

    def test_distinct(self):
        seeds = [trial_seed(42, i) for i in range(1000)]
        assert len(set(seeds)) == 1000


class TestRun:
    def test_esd_reproducible_byte_for_byte(self, tmp_path):
        cfg = dict(experiment="esd", n=30, d=3, seed=7)
        rec1 = run(ExperimentConfig(**cfg, output_dir=str(tmp_path / "a")))
        rec2 = run(ExperimentConfig(**cfg, output_dir=str(tmp_path / "b")))
        body1 = (tmp_path / "a" / "eigenvalues.csv").read_bytes()
        body2 = (tmp_path / "b" / "eigenvalues.csv").read_bytes()
        assert body1 == body2
        assert rec1.config_hash == rec2.config_hash
        lines = body1.decode().splitlines()
        assert lines[0] == f"# config={rec1.config_hash}"
        assert lines[1] == "re,im"
        assert len(lines) == 2 + 30

    def test_worker_count_does_not_change_output(self, tmp_path):
        base = dict(
            experiment="i2m",
            n=10,
            trials=6,
            seed=3,
            params={"max_m": 15, "max_n": 25},
        )
        run(ExperimentConfig(**base, output_dir=str(tmp_path / "w1"), workers=1))
        run(ExperimentConfig(**base, output_dir=str(tmp_path / "w2"), workers=3))
        assert (tmp_path / "w1" / "i2m.csv").read_bytes() == (
            tmp_path / "w2" / "i2m.csv"
        ).read_bytes()

    def test_logpot_outside_disk(self, tmp_path):
        cfg = ExperimentConfig(
            "logpot",
            n=120,
            p=0.5,
            z=2.0,
            weight_law=REAL_GAUSSIAN,
            trials=3,
            seed=1,
            output_dir=str(tmp_path),
        )
        rec = run(cfg)
        assert rec.summary["reference_potential"] == pytest.approx(math.log(2))
        assert rec.summary["abs_error"] < 0.3

    def test_metadata_written(self, tmp_path):
        cfg = ExperimentConfig(
            "dist_subspace",
            n=40,
            trials=50,
            seed=2,
            params={"k": 4},
            output_dir=str(tmp_path),
        )
        rec = run(cfg)
        meta = json.loads((tmp_path / "metadata.json").read_text())
        assert meta["config_hash"] == rec.config_hash
        assert meta["summary"]["k"] == 4
        record = json.loads((tmp_path / "run_record.json").read_text())
        assert record["trial_seeds"] == [trial_seed(2, t) for t in range(50)]

    def test_broad_experiment(self, tmp_path):
        cfg = ExperimentConfig(
            "broad",
            n=60,
            p=0.5,
            trials=3,
            seed=4,
            params={"subset_trials": 50},
            output_dir=str(tmp_path),
        )
        rec = run(cfg)
        assert rec.summary["fraction_not_falsified"] == 1.0

    def test_ssv_tail_curve_monotone(self, tmp_path):
        cfg = ExperimentConfig(
            "ssv_tail",
            n=40,
            p=0.5,
            z=0.5,
            weight_law=REAL_GAUSSIAN,
            trials=8,
            seed=5,
            output_dir=str(tmp_path),
        )
        run(cfg)
        rows = np.loadtxt(tmp_path / "ssv_tail.csv", delimiter=",", skiprows=2)
        assert (np.diff(rows[:, 1]) >= 0).all()


class TestCli:
    def test_unknown_experiment_exit_2(self, tmp_path, capsys):
        p = write_config(tmp_path, 'experiment = "nope"\nn = 10\n')
        assert main(["run", str(p)]) == 2
        assert not (tmp_path / "eigenvalues.csv").exists()

    def test_count_command(self, capsys):
        assert main(["count", "--n", "4", "--d", "2"]) == 0
        assert capsys.readouterr().out.strip() == "90"

    def test_sample_command_emits_valid_edge_list(self, capsys):
        assert main(["sample", "--n", "8", "--d", "3", "--seed", "1"]) == 0
        g = from_edge_list(capsys.readouterr().out)
        assert g.n == 8 and g.d == 3

    def test_verify_broad_command(self, capsys):
        assert main(["verify-broad", "--n", "40", "--d", "20"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["verdict"] in ("not_falsified", "violated")

    def test_run_with_overrides(self, tmp_path, capsys):
        p = write_config(
            tmp_path, 'experiment = "esd"\nn = 20\nd = 3\nseed = 1\n'
        )
        out = tmp_path / "results"
        assert main(["run", str(p), "--out", str(out), "--seed", "2"]) == 0
        rec = json.loads(capsys.readouterr().out)
        assert rec["config"]["seed"] == 2
        assert (out / "eigenvalues.csv").exists()

    def test_invalid_count_args(self, capsys):
        assert main(["count", "--n", "12", "--d", "2"]) == 2
