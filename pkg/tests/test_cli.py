import json

import pytest

from bufferhawkes.cli import ExperimentConfig, main


def run(args):
    return main(args)


class TestConfig:
    def test_round_trip(self, tmp_path):
        cfg = ExperimentConfig.from_dict(
            {"params": {"lambda0": 2, "a": 1, "b": 2, "c": 1, "d": 1}, "seed": 7, "outdir": "x"}
        )
        path = tmp_path / "cfg.json"
        cfg.save(path)
        again = ExperimentConfig.load(path)
        assert again == cfg
        assert again.to_dict() == cfg.to_dict()

    def test_missing_field(self):
        with pytest.raises(ValueError):
            ExperimentConfig.from_dict({"params": {"lambda0": 2, "a": 1}})


class TestSimulate:
    def test_smoke(self, tmp_path):
        out = tmp_path / "ev.csv"
        rc = run(
            ["simulate", "--preset", "paper-example", "--horizon", "10",
             "--seed", "3", "--outdir", str(tmp_path), "--out", "ev.csv"]
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# bufferhawkes")
        assert lines[1] == "time,kind,lambda,gamma,n"
        assert len(lines) > 2

    def test_horizon_zero_header_only(self, tmp_path):
        rc = run(
            ["simulate", "--preset", "paper-example", "--horizon", "0",
             "--outdir", str(tmp_path), "--out", "empty.csv"]
        )
        assert rc == 0
        assert len((tmp_path / "empty.csv").read_text().splitlines()) == 2

    def test_unstable_params_exit_code(self, tmp_path, capsys):
        rc = run(
            ["simulate", "--lambda0", "1", "--a", "10", "--b", "2", "--c", "1",
             "--d", "1", "--horizon", "1", "--outdir", str(tmp_path)]
        )
        assert rc == 1
        err = capsys.readouterr().err
        assert "a*c < b*(c+d)" in err

    def test_missing_params_exit_code(self, tmp_path):
        rc = run(["simulate", "--horizon", "1", "--outdir", str(tmp_path)])
        assert rc == 1

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps({"params": {"lambda0": 2, "a": 1, "b": 2, "c": 1, "d": 1}, "seed": 1})
        )
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert run(["simulate", "--config", str(cfg), "--horizon", "5",
                    "--outdir", str(tmp_path), "--out", "a.csv"]) == 0
        assert run(["simulate", "--config", str(cfg), "--seed", "99", "--horizon", "5",
                    "--outdir", str(tmp_path), "--out", "b.csv"]) == 0
        assert "seed=1" in out1.read_text().splitlines()[0]
        assert "seed=99" in out2.read_text().splitlines()[0]


class TestOtherCommands:
    def test_cluster(self, tmp_path):
        rc = run(["cluster", "--preset", "paper-example", "--horizon", "10",
                  "--outdir", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "orders.csv").exists()

    def test_cluster_z(self, tmp_path):
        rc = run(["cluster", "--preset", "paper-example", "--horizon", "10",
                  "--mode", "z", "--outdir", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "zpath.csv").read_text().splitlines()
        assert lines[1] == "time,z"

    def test_moments(self, tmp_path):
        rc = run(["moments", "--preset", "paper-example", "--t-max", "10",
                  "--points", "11", "--outdir", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "moments.csv").read_text().splitlines()
        assert len(lines) == 13

    def test_scaling(self, tmp_path):
        rc = run(["scaling", "--preset", "paper-example", "--scales", "5",
                  "--n-paths", "120", "--t-grid", "0.5,1.0", "--outdir", str(tmp_path)])
        assert rc == 0
        report = json.loads((tmp_path / "scaling.json").read_text())
        assert report["per_scale"][0]["m"] == 5
        assert (tmp_path / "scaling.csv").exists()

    def test_price(self, tmp_path):
        rc = run(["price", "--preset", "paper-example", "--horizon", "10",
                  "--kind", "GEOMETRIC", "--alpha", "0.1", "--outdir", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "price.csv").exists()

    def test_estimate_from_simulated(self, tmp_path, capsys):
        rc = run(["estimate", "--preset", "paper-example", "--horizon", "10000",
                  "--outdir", str(tmp_path)])
        assert rc == 0
        rec = json.loads(capsys.readouterr().out)
        assert 0.3 < rec["exec_ratio"] < 0.7

    def test_estimate_from_events_file(self, tmp_path, capsys):
        assert run(["simulate", "--preset", "paper-example", "--horizon", "10000",
                    "--seed", "5", "--outdir", str(tmp_path), "--out", "ev.csv"]) == 0
        capsys.readouterr()
        rc = run(["estimate", "--preset", "paper-example",
                  "--events", str(tmp_path / "ev.csv"), "--outdir", str(tmp_path)])
        assert rc == 0
        rec = json.loads(capsys.readouterr().out)
        assert rec["n_executions"] >= 100

    def test_estimate_needs_input(self, tmp_path):
        rc = run(["estimate", "--preset", "paper-example", "--outdir", str(tmp_path)])
        assert rc == 1

    def test_verify_fast(self, tmp_path, capsys):
        rc = run(["verify", "--preset", "paper-example", "--fast",
                  "--outdir", str(tmp_path)])
        out = capsys.readouterr().out
        assert "checks passed" in out
        assert rc == 0
