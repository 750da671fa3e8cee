"""Tests for config parsing, hashing, and the command line front end."""

import json

import pytest

from fpplab.cli import (CSV_HEADER, EXIT_CONFIG, EXIT_OK, EXIT_RESOURCE,
                        format_value, main)
from fpplab.config import config_hash, parse_config, serialize_config
from fpplab.errors import ConfigError
from fpplab.families import DAryTree


def simulate_doc(**overrides):
    doc = {
        "experiment": "simulate",
        "family": {"variant": "dary_tree", "d": 2},
        "law": {"variant": "constant", "c": 1.0},
        "n_grid": [3],
        "replicates": 2,
        "master_seed": 7,
    }
    doc.update(overrides)
    return doc


def run_cli(tmp_path, doc, experiment=None, threads=None):
    tmp_path.mkdir(parents=True, exist_ok=True)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(doc))
    out = tmp_path / "out"
    argv = [experiment or doc["experiment"], "--config", str(cfg),
            "--out-dir", str(out)]
    if threads:
        argv += ["--threads", str(threads)]
    code = main(argv)
    return code, out


class TestParseConfig:
    def test_minimal_valid(self):
        cfg = parse_config(json.dumps(simulate_doc()))
        assert cfg.experiment == "simulate"
        assert cfg.family == DAryTree(2)
        assert cfg.replicates == 2

    def test_round_trip(self):
        cfg = parse_config(json.dumps(simulate_doc()))
        again = parse_config(serialize_config(cfg))
        assert again == cfg

    def test_all_errors_reported_at_once(self):
        doc = simulate_doc(replicates=3, epsilon=2.0)
        doc["family"] = {"variant": "dary_tree", "d": 1}
        doc["law"] = {"variant": "nosuch"}
        with pytest.raises(ConfigError) as exc:
            parse_config(json.dumps(doc))
        msgs = "\n".join(exc.value.messages)
        assert len(exc.value.messages) >= 4
        assert "d >= 2" in msgs
        assert "replicates" in msgs
        assert "epsilon" in msgs
        assert "unknown variant" in msgs

    def test_euclidean_tiling_rejected(self):
        doc = simulate_doc()
        doc["family"] = {"variant": "hyperbolic_tiling", "p": 3, "q": 6}
        with pytest.raises(ConfigError) as exc:
            parse_config(json.dumps(doc))
        assert any("hyperbolic" in m for m in exc.value.messages)

    def test_invalid_json(self):
        with pytest.raises(ConfigError):
            parse_config("{not json")

    def test_experiment_specific_requirements(self):
        doc = simulate_doc(n_grid=[])
        with pytest.raises(ConfigError):
            parse_config(json.dumps(doc))
        doc = simulate_doc(experiment="p2p-variance")
        with pytest.raises(ConfigError):
            parse_config(json.dumps(doc))
        doc = simulate_doc(experiment="random-regular")
        with pytest.raises(ConfigError):
            parse_config(json.dumps(doc))


class TestConfigHash:
    def test_stable_under_json_reordering(self):
        a = parse_config(json.dumps(simulate_doc()))
        reordered = dict(reversed(list(simulate_doc().items())))
        b = parse_config(json.dumps(reordered))
        assert config_hash(a) == config_hash(b)

    def test_changes_with_each_semantic_field(self):
        base = parse_config(json.dumps(simulate_doc()))
        variants = [simulate_doc(master_seed=8),
                    simulate_doc(n_grid=[4]),
                    simulate_doc(replicates=4),
                    simulate_doc(epsilon=0.2),
                    simulate_doc(law={"variant": "uniform", "a": 0, "b": 1}),
                    simulate_doc(family={"variant": "dary_tree", "d": 3})]
        hashes = {config_hash(base)}
        for doc in variants:
            hashes.add(config_hash(parse_config(json.dumps(doc))))
        assert len(hashes) == len(variants) + 1


class TestValueFormat:
    def test_seventeen_digit_round_trip(self):
        for x in (1/3, 0.1, 2.0**-53, 1234.5678901234567, 3.0):
            assert float(format_value(x)) == x


class TestSimulate:
    def test_constant_tree(self, tmp_path):
        code, out = run_cli(tmp_path, simulate_doc())
        assert code == EXIT_OK
        lines = (out / "samples.csv").read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 3
        for line in lines[1:]:
            cells = line.split(",")
            assert cells[0] == "simulate"
            assert cells[1] == "dary_tree[d=2]"
            assert cells[3] == "3"
            assert float(cells[6]) == 3.0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["stats"]["3"]["mean"] == 3.0
        assert summary["errors"] == []
        assert summary["config_hash"]
        assert len(summary["samples_sha256"]) == 64

    def test_rerun_byte_identical(self, tmp_path):
        doc = simulate_doc(law={"variant": "uniform", "a": 0, "b": 1},
                           n_grid=[2, 4], replicates=4)
        _, out1 = run_cli(tmp_path / "a", doc)
        _, out2 = run_cli(tmp_path / "b", doc)
        assert (out1 / "samples.csv").read_bytes() == \
            (out2 / "samples.csv").read_bytes()
        assert (out1 / "summary.json").read_bytes() == \
            (out2 / "summary.json").read_bytes()

    def test_threads_do_not_change_bytes(self, tmp_path):
        doc = simulate_doc(law={"variant": "uniform", "a": 0, "b": 1},
                           n_grid=[4], replicates=8)
        _, out1 = run_cli(tmp_path / "a", doc, threads=1)
        _, out2 = run_cli(tmp_path / "b", doc, threads=4)
        assert (out1 / "samples.csv").read_bytes() == \
            (out2 / "samples.csv").read_bytes()

    def test_rows_sorted_by_level_then_replicate(self, tmp_path):
        doc = simulate_doc(n_grid=[4, 2], replicates=4)
        _, out = run_cli(tmp_path, doc)
        rows = [l.split(",") for l in
                (out / "samples.csv").read_text().splitlines()[1:]]
        keys = [(int(r[3]), int(r[4])) for r in rows]
        assert keys == sorted(keys)


class TestExitCodes:
    def test_missing_config_file(self, tmp_path):
        code = main(["simulate", "--config", str(tmp_path / "nope.json"),
                     "--out-dir", str(tmp_path / "o")])
        assert code == EXIT_CONFIG

    def test_invalid_config(self, tmp_path):
        doc = simulate_doc()
        doc["family"] = {"variant": "dary_tree", "d": 1}
        code, _ = run_cli(tmp_path, doc)
        assert code == EXIT_CONFIG

    def test_experiment_mismatch(self, tmp_path):
        code, _ = run_cli(tmp_path, simulate_doc(), experiment="oracle-check")
        assert code == EXIT_CONFIG

    def test_resource_budget(self, tmp_path):
        doc = simulate_doc(n_grid=[12],
                           budgets={"max_ball_vertices": 50})
        code, out = run_cli(tmp_path, doc)
        assert code == EXIT_RESOURCE
        summary = json.loads((out / "summary.json").read_text())
        assert summary["errors"]

    def test_verify_without_embedding(self, tmp_path):
        doc = simulate_doc(experiment="verify")
        doc["family"] = {"variant": "grid2d"}
        code, _ = run_cli(tmp_path, doc)
        assert code == EXIT_CONFIG


class TestVerifyExperiment:
    def test_lamplighter_report(self, tmp_path):
        doc = simulate_doc(experiment="verify", n_grid=[4])
        doc["family"] = {"variant": "lamplighter"}
        code, out = run_cli(tmp_path, doc)
        assert code == EXIT_OK
        rep = json.loads((out / "summary.json").read_text())["verification"]
        assert rep["disjoint_ok"] and rep["iso_ok"]
        assert (rep["r_1"], rep["r_2"]) == (2, 2)
        assert rep["root_distance_equal"]
        # the graph genuinely has dead ends; the verifier reports the first
        assert rep["no_dead_ends_ok"] is False
        assert rep["counterexample"]

    def test_tree_report(self, tmp_path):
        doc = simulate_doc(experiment="verify", n_grid=[4])
        code, out = run_cli(tmp_path, doc)
        rep = json.loads((out / "summary.json").read_text())["verification"]
        assert rep["disjoint_ok"] and rep["iso_ok"] and rep["no_dead_ends_ok"]
        assert (rep["r_1"], rep["r_2"]) == (1, 1)


class TestOtherExperiments:
    def test_oracle_check(self, tmp_path):
        doc = simulate_doc(experiment="oracle-check", n_grid=[2, 3],
                           replicates=4,
                           law={"variant": "uniform", "a": 0, "b": 1})
        code, out = run_cli(tmp_path, doc)
        assert code == EXIT_OK
        summary = json.loads((out / "summary.json").read_text())
        assert summary["oracle_check"]["mismatches"] == []
        assert summary["oracle_check"]["checked"] == 8

    def test_p2p_variance(self, tmp_path):
        doc = simulate_doc(experiment="p2p-variance", n_grid=[],
                           replicates=20,
                           law={"variant": "exponential", "rate": 1.0})
        doc["family"] = {"variant": "path"}
        doc["distance_grid"] = [5, 10]
        code, out = run_cli(tmp_path, doc)
        assert code == EXIT_OK
        summary = json.loads((out / "summary.json").read_text())
        assert summary["variance_scaling"]["distance_grid"] == [5, 10]
        lines = (out / "samples.csv").read_text().splitlines()
        assert len(lines) == 1 + 2 * 20

    def test_random_regular(self, tmp_path):
        doc = simulate_doc(experiment="random-regular", n_grid=[16],
                           replicates=10,
                           law={"variant": "exponential", "rate": 1.0})
        doc["family"] = {"variant": "random_regular", "d": 3,
                         "n_vertices": 16, "graph_seed": 0}
        code, out = run_cli(tmp_path, doc)
        assert code == EXIT_OK
        summary = json.loads((out / "summary.json").read_text())
        assert summary["random_pair"]["sizes"] == [16]
