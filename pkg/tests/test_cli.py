import json
import math

import numpy as np
import pytest

from superpose_net.cli import (
    ConfigError,
    dispatch,
    main,
    parse_config,
    serialize_config,
)


MINIMAL_GENERATE = {
    "command": "generate",
    "layer_distribution": {"family": "constant", "size": 3, "strength": 0.5},
    "model": {"n": 100, "mu": 1, "seed": 7},
}


class TestParseConfig:
    def test_minimal_generate(self):
        cfg = parse_config(json.dumps(MINIMAL_GENERATE))
        assert cfg.command == "generate"
        assert cfg.model["n"] == 100
        assert cfg.output["formats"] == ["csv"]
        assert cfg.theory["tail_epsilon"] == 1e-10

    def test_bad_strength(self):
        doc = json.loads(json.dumps(MINIMAL_GENERATE))
        doc["layer_distribution"]["strength"] = 1.5
        with pytest.raises(ConfigError) as exc:
            parse_config(json.dumps(doc))
        assert "layer_distribution.strength" in str(exc.value)

    def test_both_m_and_mu(self):
        doc = json.loads(json.dumps(MINIMAL_GENERATE))
        doc["model"]["m"] = 50
        with pytest.raises(ConfigError) as exc:
            parse_config(json.dumps(doc))
        assert "model.m" in str(exc.value)

    def test_unknown_key_rejected(self):
        doc = json.loads(json.dumps(MINIMAL_GENERATE))
        doc["bogus"] = 1
        with pytest.raises(ConfigError):
            parse_config(json.dumps(doc))
        doc = json.loads(json.dumps(MINIMAL_GENERATE))
        doc["model"]["bogus"] = 1
        with pytest.raises(ConfigError):
            parse_config(json.dumps(doc))

    def test_round_trip(self):
        cfg = parse_config(json.dumps(MINIMAL_GENERATE))
        again = parse_config(json.dumps(serialize_config(cfg)))
        assert serialize_config(again) == serialize_config(cfg)

    def test_missing_required(self):
        with pytest.raises(ConfigError):
            parse_config(json.dumps({"command": "generate"}))


class TestDispatch:
    def test_theory_poisson_case(self, tmp_path):
        cfg = parse_config(json.dumps({
            "command": "theory",
            "layer_distribution": {"family": "constant", "size": 2, "strength": 1.0},
            "theory": {"mu": 0.5},
        }))
        dispatch(cfg, tmp_path)
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["assortativity"] == pytest.approx(0.0, abs=1e-12)
        pmf_lines = (tmp_path / "limiting_degree_pmf.csv").read_text().splitlines()
        first = pmf_lines[1].split(",")
        assert first[0] == "0"
        assert float(first[1]) == pytest.approx(math.exp(-1), abs=1e-12)
        assert (tmp_path / "manifest.json").exists()

    def test_empirical_path_graph(self, tmp_path):
        edge_file = tmp_path / "path.edgelist"
        edge_file.write_text("# superpose-net n=3 m=2 seed=0\n1 2\n2 3\n")
        cfg = parse_config(json.dumps({
            "command": "empirical",
            "input": {"edge_list": str(edge_file)},
        }))
        dispatch(cfg, tmp_path / "out")
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["assortativity"] == pytest.approx(-1.0)

    def test_generate_is_reproducible(self, tmp_path):
        cfg_doc = json.dumps(MINIMAL_GENERATE)
        dispatch(parse_config(cfg_doc), tmp_path / "a")
        dispatch(parse_config(cfg_doc), tmp_path / "b")
        assert (tmp_path / "a" / "graph.edgelist").read_bytes() == \
            (tmp_path / "b" / "graph.edgelist").read_bytes()

    def test_converge_command(self, tmp_path):
        cfg = parse_config(json.dumps({
            "command": "converge",
            "layer_distribution": {"family": "constant", "size": 3, "strength": 0.5},
            "study": {"mu": 1.0, "n_grid": [100], "replications": 2, "seed": 3,
                      "metrics": ["tv1"]},
        }))
        dispatch(cfg, tmp_path)
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        stem = manifest["outputs"][0]
        assert "seed3" in stem
        assert (tmp_path / stem).exists()

    def test_tailfit_command(self, tmp_path):
        cfg = parse_config(json.dumps({
            "command": "tailfit",
            "layer_distribution": {"family": "power_law", "alpha": 3.0, "beta": 0.5,
                                   "b": 1.0, "x_min": 1, "x_max": 500},
            "theory": {"mu": 1.0},
        }))
        dispatch(cfg, tmp_path)
        pred = json.loads((tmp_path / "tail_prediction.json").read_text())
        assert pred["marginal_exponent"] == pytest.approx(2.0)


class TestMainExitCodes:
    def test_config_error_is_1(self, tmp_path, capsys):
        code = main(["generate", "--config", "{}", "--out", str(tmp_path)])
        assert code == 1

    def test_hypothesis_violation_is_3(self, tmp_path):
        doc = json.dumps({
            "command": "tailfit",
            "layer_distribution": {"family": "power_law", "alpha": 2.5, "beta": 0.4,
                                   "b": 1.0, "x_min": 1, "x_max": 100},
            "theory": {"mu": 1.0},
        })
        code = main(["tailfit", "--config", doc, "--out", str(tmp_path)])
        assert code == 3

    def test_success_is_0(self, tmp_path):
        code = main(["theory", "--config", json.dumps({
            "layer_distribution": {"family": "constant", "size": 3, "strength": 0.5},
            "theory": {"mu": 1.0},
        }), "--out", str(tmp_path)])
        assert code == 0

    def test_threads_flag_does_not_change_output(self, tmp_path):
        doc = json.dumps({
            "layer_distribution": {"family": "tabular",
                                   "atoms": [[3, 0.6, 0.5], [8, 0.2, 0.5]]},
            "model": {"n": 400, "mu": 1, "seed": 21},
        })
        for name, threads in (("t1", "1"), ("t4", "4")):
            assert main(["generate", "--config", doc, "--out", str(tmp_path / name),
                         "--threads", threads]) == 0
        assert (tmp_path / "t1" / "graph.edgelist").read_bytes() == \
            (tmp_path / "t4" / "graph.edgelist").read_bytes()

    def test_seed_override(self, tmp_path):
        doc = json.dumps(MINIMAL_GENERATE)
        assert main(["generate", "--config", doc, "--out", str(tmp_path / "a"),
                     "--seed", "99"]) == 0
        manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
        assert manifest["seed"] == 99
