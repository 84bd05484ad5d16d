import json
import subprocess
import sys
from pathlib import Path

import pytest

from marketsim.cli import builtin_scenarios, main

from helpers import document


@pytest.fixture()
def tiny_config(tmp_path):
    doc = document(
        agents=("a1", "a2"),
        users=3,
        batch_size=2,
        horizon=6,
        window=3,
        oracle={"kind": "bernoulli", "p": {"a1": 0.8, "a2": 0.3}},
    )
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def read(path):
    return Path(path).read_bytes()


class TestSimulate:
    def test_bundled_scenario_by_name(self, tmp_path):
        out = tmp_path / "run"
        assert main(["simulate", "qwen_late_entry", "--out", str(out), "--quiet"]) == 0
        lines = (out / "log.jsonl").read_text().splitlines()
        assert len(lines) == 1 + 200 * 5  # header + horizon * batch
        assert "config_digest" in json.loads(lines[0])
        resolved = json.loads((out / "config.resolved.json").read_text())
        assert resolved["simulation"]["horizon"] == 200
        entrant_steps = [
            json.loads(line)["t"] for line in lines[1:] if "qwen3" in json.loads(line)["trajectory"]
        ]
        assert min(entrant_steps) >= 101

    def test_seed_override_changes_log_same_schema(self, tiny_config, tmp_path):
        out1, out2 = tmp_path / "s0", tmp_path / "s7"
        assert main(["simulate", str(tiny_config), "--out", str(out1), "--quiet"]) == 0
        assert main(
            ["simulate", str(tiny_config), "--out", str(out2), "--quiet",
             "--override", "simulation.seed=7"]
        ) == 0
        log1 = (out1 / "log.jsonl").read_text().splitlines()
        log2 = (out2 / "log.jsonl").read_text().splitlines()
        assert log1 != log2
        assert set(json.loads(log1[1])) == set(json.loads(log2[1]))

    def test_missing_pool_file_exit_2_names_path(self, tmp_path, capsys):
        doc = document()
        doc["pool"] = {"file": "gone_pool.json"}
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        assert main(["simulate", str(path), "--out", str(tmp_path / "x"), "--quiet"]) == 2
        assert "gone_pool.json" in capsys.readouterr().err

    def test_unknown_config_exit_2(self, tmp_path, capsys):
        assert main(["simulate", str(tmp_path / "none.json"), "--quiet"]) == 2


class TestMetrics:
    def run_both(self, config_path, out):
        assert main(["simulate", str(config_path), "--out", str(out), "--quiet"]) == 0
        code = main(
            ["metrics", str(out / "log.jsonl"), str(out / "config.resolved.json"),
             "--out", str(out), "--quiet"]
        )
        assert code == 0

    def test_qwen_outputs(self, tmp_path):
        out = tmp_path / "m"
        out.mkdir()
        assert main(["simulate", "qwen_late_entry", "--out", str(out), "--quiet"]) == 0
        assert main(
            ["metrics", str(out / "log.jsonl"), str(out / "config.resolved.json"),
             "--out", str(out), "--quiet"]
        ) == 0
        concentration = (out / "concentration.csv").read_text().splitlines()
        assert concentration[0] == "t,hhi,eed,dominance_gap,ee"
        assert len(concentration) == 1 + 200  # one row per step
        shares = (out / "market_share.csv").read_text().splitlines()
        assert shares[0] == "t,agent,share"
        assert len(shares) == 1 + 200 * 7
        retention = (out / "retention.csv").read_text().splitlines()
        assert retention[0] == "agent,m,cr,n_adopters"
        fair = (out / "fair_share.csv").read_text().splitlines()
        assert fair[0] == "agent,score,epsilon_star,delta_fs"
        summary = json.loads((out / "summary.json").read_text())
        assert summary["final"]["t"] == 200
        assert abs(sum(summary["final"]["shares"].values()) - 1.0) < 1e-9

    def test_idempotent_rerun_byte_identical(self, tiny_config, tmp_path):
        out = tmp_path / "r"
        self.run_both(tiny_config, out)
        first = {p.name: read(p) for p in out.iterdir()}
        self.run_both(tiny_config, out)
        second = {p.name: read(p) for p in out.iterdir()}
        assert first == second

    def test_single_agent_all_shares_one(self, tmp_path):
        doc = document(agents=("solo",), users=2, batch_size=1, horizon=4, window=2)
        path = tmp_path / "solo.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        out = tmp_path / "solo_out"
        self.run_both(path, out)
        rows = (out / "market_share.csv").read_text().splitlines()[1:]
        assert all(row.endswith(",1.0") for row in rows)

    def test_digest_mismatch_exit_2(self, tiny_config, tmp_path, capsys):
        out = tmp_path / "d"
        assert main(["simulate", str(tiny_config), "--out", str(out), "--quiet"]) == 0
        other = tmp_path / "other.json"
        doc = json.loads(tiny_config.read_text())
        doc["simulation"]["seed"] = 123
        other.write_text(json.dumps(doc), encoding="utf-8")
        code = main(["metrics", str(out / "log.jsonl"), str(other), "--out", str(out), "--quiet"])
        assert code == 2
        assert "digest" in capsys.readouterr().err

    def test_truncated_log_exit_1_names_line(self, tiny_config, tmp_path, capsys):
        out = tmp_path / "t"
        assert main(["simulate", str(tiny_config), "--out", str(out), "--quiet"]) == 0
        log_path = out / "log.jsonl"
        text = log_path.read_text()
        log_path.write_text(text[:-8], encoding="utf-8")
        code = main(
            ["metrics", str(log_path), str(out / "config.resolved.json"), "--out", str(out), "--quiet"]
        )
        assert code == 1
        assert "line" in capsys.readouterr().err


class TestSweep:
    def test_three_seed_sweep(self, tiny_config, tmp_path, monkeypatch):
        monkeypatch.setenv("MARKET_SIM_THREADS", "2")
        out = tmp_path / "sweep"
        assert main(["sweep", str(tiny_config), "--seeds", "0:3", "--out", str(out), "--quiet"]) == 0
        summary = json.loads((out / "sweep_summary.json").read_text())
        assert summary["seeds"] == [0, 1, 2]
        assert len(summary["runs"]) == 3 and summary["failures"] == []
        for entry in summary["runs"]:
            run_dir = Path(entry["out_dir"])
            assert (run_dir / "log.jsonl").is_file()
            assert (run_dir / "summary.json").is_file()
            assert entry["final_hhi"] >= 10000 / 2
            assert entry["top_agent"] in ("a1", "a2")

    def test_size_one_sweep_equals_simulate_plus_metrics(self, tiny_config, tmp_path, monkeypatch):
        monkeypatch.setenv("MARKET_SIM_THREADS", "1")
        sweep_out = tmp_path / "sw"
        assert main(
            ["sweep", str(tiny_config), "--seeds", "5,", "--out", str(sweep_out), "--quiet"]
        ) == 2  # trailing comma is malformed
        assert main(
            ["sweep", str(tiny_config), "--seeds", "5", "--out", str(sweep_out), "--quiet"]
        ) == 0
        direct = tmp_path / "direct"
        assert main(
            ["simulate", str(tiny_config), "--out", str(direct), "--quiet",
             "--override", "simulation.seed=5"]
        ) == 0
        assert main(
            ["metrics", str(direct / "log.jsonl"), str(direct / "config.resolved.json"),
             "--out", str(direct), "--quiet"]
        ) == 0
        seed_dir = sweep_out / "seed_5"
        for name in ("log.jsonl", "config.resolved.json", "market_share.csv",
                     "concentration.csv", "retention.csv", "fair_share.csv", "summary.json"):
            assert read(seed_dir / name) == read(direct / name), name

    def test_duplicate_seeds_rejected(self, tiny_config, tmp_path, capsys):
        assert main(
            ["sweep", str(tiny_config), "--seeds", "1,2,1", "--out", str(tmp_path), "--quiet"]
        ) == 2
        assert "duplicates" in capsys.readouterr().err

    def test_twenty_seed_bundled_sweep(self, tmp_path):
        out = tmp_path / "qwen_sweep"
        assert main(
            ["sweep", "qwen_late_entry", "--seeds", "0:20", "--out", str(out), "--quiet"]
        ) == 0
        summary = json.loads((out / "sweep_summary.json").read_text())
        assert len(summary["runs"]) == 20
        for entry in summary["runs"]:
            assert entry["entrant"] == "qwen3"
            assert 0.0 <= entry["entrant_share"] <= 1.0
            assert entry["pre_entry_hhi"] is not None


class TestValidateCommands:
    def test_rankcorr_identical_files(self, tmp_path):
        a = tmp_path / "a.txt"
        b = tmp_path / "b.txt"
        a.write_text("m1\nm2\nm3\n")
        b.write_text("m1\nm2\nm3\n")
        out = tmp_path / "v"
        assert main(["validate", "rankcorr", str(a), str(b), "--out", str(out), "--quiet"]) == 0
        report = json.loads((out / "validation_rankcorr.json").read_text())
        assert report["statistic"] == "kendall_tau"
        assert report["observed"] == 1.0

    def test_bootstrap_below_floor_exit_2(self, tmp_path, capsys):
        a = tmp_path / "a.txt"
        b = tmp_path / "b.txt"
        a.write_text("1\n2\n3\n")
        b.write_text("0\n1\n2\n")
        code = main(
            ["validate", "bootstrap", "--samples-a", str(a), "--samples-b", str(b),
             "--resamples", "100", "--out", str(tmp_path), "--quiet"]
        )
        assert code == 2
        assert "1000" in capsys.readouterr().err

    def test_bootstrap_report_schema(self, tmp_path):
        a = tmp_path / "a.txt"
        b = tmp_path / "b.txt"
        a.write_text("\n".join(str(0.5 + 0.01 * i) for i in range(20)))
        b.write_text("\n".join(str(0.4 + 0.01 * i) for i in range(20)))
        out = tmp_path / "vb"
        assert main(
            ["validate", "bootstrap", "--samples-a", str(a), "--samples-b", str(b),
             "--resamples", "1000", "--seed", "3", "--out", str(out), "--quiet"]
        ) == 0
        report = json.loads((out / "validation_bootstrap.json").read_text())
        for key in ("statistic", "observed", "asl", "ci_low", "ci_high", "resamples", "seeds"):
            assert key in report
        assert report["observed"] == pytest.approx(0.1, abs=1e-9)

    def test_null_perturbation_all_zero(self, tiny_config, tmp_path):
        out = tmp_path / "vp"
        assert main(
            ["validate", "perturb", "--config", str(tiny_config), "--target", "a1",
             "--knob", "quality_delta", "--magnitude", "0", "--seeds", "0:3",
             "--out", str(out), "--quiet"]
        ) == 0
        report = json.loads((out / "validation_perturb.json").read_text())
        assert report["observed"] == 0.0
        assert report["share_deltas"] == [0.0, 0.0, 0.0]
        assert report["seeds"] == [0, 1, 2]


class TestReplayCommand:
    def test_replay_ok(self, tiny_config, tmp_path):
        out = tmp_path / "r"
        assert main(["simulate", str(tiny_config), "--out", str(out), "--quiet"]) == 0
        assert main(
            ["replay", str(out / "log.jsonl"), str(out / "config.resolved.json"), "--quiet"]
        ) == 0

    def test_replay_with_different_seed_exit_2(self, tiny_config, tmp_path, capsys):
        out = tmp_path / "r2"
        assert main(["simulate", str(tiny_config), "--out", str(out), "--quiet"]) == 0
        code = main(
            ["replay", str(out / "log.jsonl"), str(out / "config.resolved.json"),
             "--seed-override", "99", "--quiet"]
        )
        assert code == 2

    def test_replay_tampered_log_exit_1(self, tiny_config, tmp_path, capsys):
        out = tmp_path / "r3"
        assert main(["simulate", str(tiny_config), "--out", str(out), "--quiet"]) == 0
        log_path = out / "log.jsonl"
        lines = log_path.read_text().splitlines()
        rec = json.loads(lines[3])
        rec["mu"] = 0.42
        lines[3] = json.dumps(rec, separators=(",", ":"))
        log_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        code = main(
            ["replay", str(log_path), str(out / "config.resolved.json"), "--quiet"]
        )
        assert code == 1
        assert "diverged at step" in capsys.readouterr().err


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "marketsim", "--version"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "marketsim" in proc.stdout


def test_builtin_scenarios_present():
    names = set(builtin_scenarios())
    assert {"qwen_late_entry", "deepseek_late_entry"} <= names
