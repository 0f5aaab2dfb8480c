import csv
import json
from pathlib import Path

import pytest

from sparseqaoa import ConfigError, generate_random_graph, write_graph_file
from sparseqaoa.experiment import (
    CSV_COLUMNS,
    derive_seed,
    load_config,
    parse_config,
    plan_summary,
    run_experiment,
)
from sparseqaoa.plotting import emit_plots, read_rows
from sparseqaoa import cli


def base_config(out_dir, **overrides):
    raw = {
        "schema_version": 1,
        "seed": 13,
        "out_dir": str(out_dir),
        "p_values": [1],
        "graphs": [{"id": "tiny", "n": 2, "m": 1, "seed": 0}],
        "variants": [{"kind": "standard"}],
        "optimizer": {"num_random_starts": 4},
    }
    raw.update(overrides)
    return raw


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def rows_without_timing(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    drop = rows[0].index("wall_time_ms")
    return [r[:drop] + r[drop + 1 :] for r in rows]


class TestConfigValidation:
    def test_all_problems_reported_before_running(self):
        raw = {
            "schema_version": 2,
            "graphs": [{"n": 5}],
            "variants": [{"kind": "random_sparse"}, {"kind": "mystery"}],
            "p_values": [0],
        }
        with pytest.raises(ConfigError) as err:
            parse_config(raw)
        message = str(err.value)
        for fragment in ("schema_version", "graphs[0]", "p_e", "mystery", "p_values"):
            assert fragment in message

    def test_sparsifier_requires_method_and_ratio(self):
        raw = base_config("x", variants=[{"kind": "sparsifier"}])
        with pytest.raises(ConfigError, match="method"):
            parse_config(raw)

    def test_unknown_optimizer_option(self):
        raw = base_config("x", optimizer={"momentum": 0.9})
        with pytest.raises(ConfigError, match="momentum"):
            parse_config(raw)

    def test_initial_given_requires_assignment(self):
        raw = base_config(
            "x", variants=[{"kind": "sparse", "initial": {"choice": "given"}}]
        )
        with pytest.raises(ConfigError, match="assignment"):
            parse_config(raw)


class TestRunExperiment:
    def test_single_edge_reaches_ratio_one(self, tmp_path):
        config = parse_config(base_config(tmp_path / "out"))
        result = run_experiment(config)
        assert len(result.rows) == 1
        row = result.rows[0]
        assert abs(row["ratio"] - 1.0) < 1e-4
        assert row["c_max"] == 1
        assert result.csv_path.exists() and result.manifest_path.exists()
        manifest = json.loads(result.manifest_path.read_text())
        assert manifest["csv_columns"] == CSV_COLUMNS
        assert manifest["graphs"][0]["c_max"] == 1
        assert manifest["errors"] == []

    def test_replay_byte_identical_minus_timing(self, tmp_path):
        raw = base_config(
            tmp_path / "a",
            graphs=[{"id": "g", "n": 6, "m": 9, "seed": 3}],
            variants=[
                {"kind": "standard"},
                {"kind": "sparse", "initial": {"choice": "exact"}, "k_values": "all"},
            ],
        )
        first = run_experiment(parse_config(raw))
        raw["out_dir"] = str(tmp_path / "b")
        second = run_experiment(parse_config(raw))
        assert rows_without_timing(first.csv_path) == rows_without_timing(second.csv_path)

    def test_worker_pool_matches_serial(self, tmp_path):
        raw = base_config(
            tmp_path / "serial",
            graphs=[{"id": "g", "n": 5, "m": 6, "seed": 2}],
            p_values=[1, 2],
        )
        serial = run_experiment(parse_config(raw), jobs=1)
        raw["out_dir"] = str(tmp_path / "pool")
        pooled = run_experiment(parse_config(raw), jobs=2)
        assert rows_without_timing(serial.csv_path) == rows_without_timing(pooled.csv_path)

    def test_adding_variant_keeps_other_streams(self, tmp_path):
        raw = base_config(
            tmp_path / "one",
            graphs=[{"id": "g", "n": 6, "m": 9, "seed": 3}],
            variants=[{"kind": "standard"}],
        )
        only_standard = run_experiment(parse_config(raw))
        raw["out_dir"] = str(tmp_path / "two")
        raw["variants"] = [
            {"kind": "standard"},
            {"kind": "sparse", "initial": {"choice": "exact"}, "k_values": "all"},
        ]
        both = run_experiment(parse_config(raw))
        standard_rows = [r for r in read_csv(both.csv_path) if r["variant"] == "standard"]
        solo_rows = read_csv(only_standard.csv_path)
        for a, b in zip(solo_rows, standard_rows):
            a.pop("wall_time_ms"), b.pop("wall_time_ms")
            assert a == b

    def test_pinned_cut_reproduces_standard(self, tmp_path):
        raw = base_config(
            tmp_path / "out",
            graphs=[{"id": "g", "n": 5, "m": 7, "seed": 4}],
            variants=[
                {"kind": "standard"},
                {"kind": "cut", "pin_equal_gammas": True},
            ],
        )
        rows = read_csv(run_experiment(parse_config(raw)).csv_path)
        standard = [r for r in rows if r["variant"] == "standard"]
        pinned = [r for r in rows if r["detail"] == "pinned"]
        assert len(standard) == len(pinned) == 1
        assert float(standard[0]["expectation"]) == pytest.approx(
            float(pinned[0]["expectation"]), abs=1e-9
        )
        assert standard[0]["seed"] == pinned[0]["seed"]

    def test_sparse_keeps_exactly_cut_edges(self, tmp_path):
        # frozen instance: G(10, 30, 8) has c_max = 20
        raw = base_config(
            tmp_path / "out",
            graphs=[{"id": "g30", "n": 10, "m": 30, "seed": 8}],
            variants=[{"kind": "sparse", "initial": {"choice": "exact"}, "k_values": "all"}],
            optimizer={"num_random_starts": 2},
        )
        row = run_experiment(parse_config(raw)).rows[0]
        assert row["phase_gate_count"] == 3 * 20
        assert row["scaled_p"] == pytest.approx(20 / 30)
        assert row["aligned_levels"] >= 1

    def test_scaled_p_two_thirds_mapping(self, tmp_path):
        raw = base_config(
            tmp_path / "out",
            graphs=[{"id": "g30", "n": 10, "m": 30, "seed": 8}],
            p_values=[3],
            variants=[{"kind": "sparse", "initial": {"choice": "exact"}, "k_values": "all"}],
            optimizer={"num_random_starts": 2},
        )
        row = run_experiment(parse_config(raw)).rows[0]
        assert row["scaled_p"] == 2.0

    def test_ratio_bounds_on_all_rows(self, tmp_path):
        raw = base_config(
            tmp_path / "out",
            graphs=[{"id": "g", "n": 6, "m": 9, "seed": 1}],
            variants=[
                {"kind": "standard"},
                {"kind": "random_sparse", "initial": {"choice": "exact"}, "p_e": 0.6},
                {"kind": "random_cut", "initial": {"choice": "exact"}, "p_e": 0.6},
                {"kind": "sparsifier", "method": "effective", "target_ratio": 0.66},
            ],
        )
        for row in run_experiment(parse_config(raw)).rows:
            assert 0.0 <= row["ratio"] <= 1.0 + 1e-9

    def test_graph_from_file(self, tmp_path):
        g = generate_random_graph(5, 6, 11)
        write_graph_file(g, tmp_path / "mine.txt")
        raw = base_config(
            tmp_path / "out", graphs=[{"path": "mine.txt"}], optimizer={"num_random_starts": 2}
        )
        config_path = tmp_path / "cfg.json"
        config_path.write_text(json.dumps(raw))
        result = run_experiment(load_config(config_path))
        assert result.rows[0]["graph_id"] == "mine"
        assert result.rows[0]["m_original"] == 6

    def test_plan_summary_mentions_rows(self, tmp_path):
        config = parse_config(base_config(tmp_path, p_values=[1, 2, 3]))
        text = "\n".join(plan_summary(config))
        assert "total planned rows: 3" in text

    def test_alignment_study_csv(self, tmp_path):
        raw = base_config(
            tmp_path / "out",
            graphs=[{"id": "g", "n": 6, "m": 9, "seed": 3}],
            variants=[
                {"kind": "standard"},
                {"kind": "sparse", "initial": {"choice": "exact"}, "k_values": "all"},
            ],
            optimizer={"num_random_starts": 3},
        )
        result = run_experiment(parse_config(raw))
        assert result.study_path is not None
        study = read_csv(result.study_path)
        assert len(study) == 1
        record = study[0]
        assert record["sparsifier"].startswith("sparse/exact")
        assert int(record["aligned_levels"]) >= 1
        delta = float(record["ratio_sparse"]) - float(record["ratio_standard"])
        assert abs(float(record["delta"]) - delta) < 1e-12

    def test_unattainable_instantiation_recorded_not_fatal(self, tmp_path):
        # K3 has no cut of size c_max - 1, so the distance-1 initial solution
        # fails; the standard rows must still be produced
        raw = base_config(
            tmp_path / "out",
            graphs=[{"id": "k3", "n": 3, "m": 3, "seed": 0}],
            variants=[
                {"kind": "standard"},
                {"kind": "sparse", "initial": {"choice": "distance", "d": 1}},
            ],
            optimizer={"num_random_starts": 2},
        )
        result = run_experiment(parse_config(raw))
        assert len(result.rows) == 1
        assert result.rows[0]["variant"] == "standard"
        assert len(result.errors) == 1
        assert "NotFoundError" in result.errors[0]["error"]
        manifest = json.loads(result.manifest_path.read_text())
        assert manifest["errors"]


class TestSeedDerivation:
    def test_stable_and_distinct(self):
        a = derive_seed(1, "g", "standard", "", 1, "opt")
        assert a == derive_seed(1, "g", "standard", "", 1, "opt")
        assert a != derive_seed(2, "g", "standard", "", 1, "opt")
        assert a != derive_seed(1, "g", "standard", "", 2, "opt")

    def test_no_delimiter_collisions(self):
        assert derive_seed("ab", "c") != derive_seed("a", "bc")


class TestPlots:
    def _rows(self, tmp_path):
        raw = base_config(
            tmp_path / "out",
            graphs=[{"id": "g", "n": 6, "m": 9, "seed": 3}],
            p_values=[1, 2, 3],
            variants=[
                {"kind": "standard"},
                {"kind": "sparse", "initial": {"choice": "exact"}, "k_values": "all"},
            ],
            optimizer={"num_random_starts": 3},
        )
        return run_experiment(parse_config(raw))

    def test_ratio_plot_markers_and_legend(self, tmp_path):
        result = self._rows(tmp_path)
        paths = emit_plots(result.rows, "ratio_vs_p", tmp_path / "plots")
        assert len(paths) == 1
        svg = paths[0].read_text()
        assert svg.lstrip().startswith("<?xml")
        assert "<svg" in svg and "legend" in svg
        assert svg.count("<use") >= 6  # two series, three markers each

    def test_plot_from_csv_round_trip(self, tmp_path):
        result = self._rows(tmp_path)
        rows = read_rows(result.csv_path)
        paths = emit_plots(rows, "ratio_vs_scaled_p", tmp_path / "plots2")
        assert paths and paths[0].exists()

    def test_delta_plot_needs_alignment_rows(self, tmp_path):
        result = self._rows(tmp_path)
        paths = emit_plots(result.rows, "delta_vs_alignment", tmp_path / "plots3")
        assert len(paths) == 1

    def test_empty_rows_no_op(self, tmp_path):
        assert emit_plots([], "ratio_vs_p", tmp_path) == []

    def test_unknown_style(self, tmp_path):
        with pytest.raises(ValueError):
            emit_plots([{"p": 1}], "pie_chart", tmp_path)


class TestCli:
    def test_maxcut_command(self, tmp_path, capsys):
        write_graph_file(generate_random_graph(6, 9, 3), tmp_path / "g.txt")
        assert cli.main(["maxcut", str(tmp_path / "g.txt")]) == 0
        out = capsys.readouterr().out
        assert "c_max:" in out

    def test_align_command(self, tmp_path, capsys):
        g = generate_random_graph(6, 9, 3)
        write_graph_file(g, tmp_path / "a.txt")
        write_graph_file(g, tmp_path / "b.txt")
        assert cli.main(["align", str(tmp_path / "a.txt"), str(tmp_path / "b.txt"), "--per-level"]) == 0
        out = capsys.readouterr().out
        assert "aligned_levels:" in out and "level 1:" in out

    def test_sparsify_command_emits_edge_list(self, tmp_path, capsys):
        write_graph_file(generate_random_graph(10, 30, 8), tmp_path / "g.txt")
        code = cli.main(
            ["sparsify", str(tmp_path / "g.txt"), "--method", "effective", "--ratio", "0.66"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("10 20\n")

    def test_run_dry_run(self, tmp_path, capsys):
        config_path = tmp_path / "cfg.json"
        config_path.write_text(json.dumps(base_config(tmp_path / "out")))
        assert cli.main(["run", str(config_path), "--dry-run"]) == 0
        assert "total planned rows" in capsys.readouterr().out

    def test_run_and_plot_commands(self, tmp_path, capsys):
        config_path = tmp_path / "cfg.json"
        config_path.write_text(json.dumps(base_config(tmp_path / "out")))
        assert cli.main(["run", str(config_path), "--seed", "5"]) == 0
        csv_path = tmp_path / "out" / "results.csv"
        assert csv_path.exists()
        assert cli.main(["plot", str(csv_path), "--style", "ratio_vs_p", "--out-dir", str(tmp_path / "p")]) == 0

    def test_shipped_quickstart_config_parses(self):
        config = load_config(Path(__file__).resolve().parent.parent / "configs" / "quickstart.json")
        assert config.p_values == [1, 2]
        assert [v.kind for v in config.variants] == ["standard", "sparse", "cut"]
