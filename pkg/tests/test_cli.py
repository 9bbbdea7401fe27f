"""End-to-end tests for the szwalk command line interface."""

import json
import math

import pytest

from szwalk.cli import (
    ConfigError,
    ExperimentConfig,
    build_config,
    build_parser,
    grid_values,
    main,
    parse_marked,
    parse_p_grid,
)


def run(argv):
    return main(argv)


def read_json(path):
    return json.loads(path.read_text())


def test_qht_complete3(tmp_path):
    code = run(["qht", "--graph", "complete:3", "--marked", "first:1", "--out", str(tmp_path)])
    assert code == 0
    summary = read_json(tmp_path / "qht_summary.json")
    assert summary["schema_version"] == 1
    assert summary["T_star"] == 1
    assert summary["within_bound"] is True
    assert summary["config"]["graph"] == "complete:3"
    curve = (tmp_path / "qht_curve.csv").read_text().splitlines()
    assert curve[0] == "T,F,threshold,crossed"
    assert curve[1].startswith("0,0,")


def test_rerun_byte_identical(tmp_path):
    d1 = tmp_path / "a"
    d2 = tmp_path / "b"
    argv = ["dqht", "--graph", "complete:3", "--marked", "0", "--p", "0.01",
            "--mode", "exact", "--seed", "7"]
    assert run(argv + ["--out", str(d1)]) == 0
    assert run(argv + ["--out", str(d2)]) == 0
    for name in ("dqht_sweep.csv", "dqht_summary.json"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_dqht_grid_rows(tmp_path):
    code = run(["dqht", "--graph", "complete:3", "--marked", "0",
                "--p-grid", "0:0.002:0.004", "--out", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "dqht_sweep.csv").read_text().splitlines()
    assert lines[0] == "p,T_star,dqht_bound,within_threshold,within_bound"
    assert len(lines) == 4
    cells = [float(line.split(",")[0]) for line in lines[1:]]
    assert cells == pytest.approx([0.0, 0.002, 0.004])
    summary = read_json(tmp_path / "dqht_summary.json")
    assert [row["within_bound"] for row in summary["rows"]] == [True] * 3


def test_dqht_requires_p(tmp_path):
    assert run(["dqht", "--graph", "complete:3", "--marked", "0",
                "--out", str(tmp_path)]) == 2


def test_p_and_grid_mutually_exclusive(capsys):
    with pytest.raises(SystemExit) as err:
        build_parser().parse_args(
            ["dqht", "--graph", "complete:3", "--p", "0.1", "--p-grid", "0:0.1:0.2"]
        )
    assert err.value.code == 2


def test_detect_marked(tmp_path):
    code = run(["detect", "--graph", "complete:3", "--marked", "0", "--p", "0.0",
                "--samples", "200", "--seed", "3", "--out", str(tmp_path)])
    assert code == 0
    report = read_json(tmp_path / "detect_report.json")
    assert report["pass"] is True
    assert report["T"] == 16
    assert report["trials"] == 200


def test_detect_empty_marked_needs_tcap(tmp_path):
    argv = ["detect", "--graph", "complete:3", "--marked", "none", "--p", "0.05",
            "--variant", "removal", "--samples", "50", "--out", str(tmp_path)]
    assert run(argv) == 2
    assert run(argv + ["--tcap", "4"]) == 0
    report = read_json(tmp_path / "detect_report.json")
    assert report["frac_outcome1"] == 0.0
    assert report["pass"] is True


def test_verify_ok(tmp_path, capsys):
    assert run(["verify", "--out", str(tmp_path)]) == 0
    report = read_json(tmp_path / "verify_report.json")
    assert report["all_pass"] is True
    assert all(c["pass"] for c in report["checks"])
    out = capsys.readouterr().out
    assert "verify: all checks passed" in out


def test_verify_corrupt_fails(tmp_path, capsys):
    assert run(["verify", "--corrupt", "--out", str(tmp_path)]) == 1
    report = read_json(tmp_path / "verify_report.json")
    assert report["all_pass"] is False
    bad = [c for c in report["checks"] if not c["pass"]]
    assert len(bad) == 1
    assert "row" in bad[0]["violated"]


def test_bounds_values(tmp_path):
    code = run(["bounds", "--graph", "complete:3", "--marked", "0", "--p", "0.0",
                "--out", str(tmp_path)])
    assert code == 0
    report = read_json(tmp_path / "bounds_report.json")
    assert report["szegedy_bound"] == pytest.approx(100.0 * math.sqrt(2.0), rel=1e-12)
    assert report["p_threshold"] == pytest.approx(math.pi / 2700.0, rel=1e-12)


def test_bounds_need_marked(tmp_path):
    assert run(["bounds", "--graph", "complete:3", "--marked", "none",
                "--out", str(tmp_path)]) == 2


def test_bad_graph_spec(tmp_path):
    assert run(["qht", "--graph", "grid:3", "--marked", "0", "--out", str(tmp_path)]) == 2
    assert run(["qht", "--graph", "cycle:4", "--marked", "0", "--out", str(tmp_path)]) == 2


def test_marked_out_of_range(tmp_path):
    assert run(["qht", "--graph", "complete:3", "--marked", "5", "--out", str(tmp_path)]) == 2


def test_graph_from_file(tmp_path):
    gpath = tmp_path / "g.json"
    gpath.write_text(json.dumps({"n": 3, "edges": [[0, 1], [0, 2], [1, 2]]}))
    code = run(["qht", "--graph", f"file:{gpath}", "--marked", "0",
                "--out", str(tmp_path)])
    assert code == 0
    assert read_json(tmp_path / "qht_summary.json")["T_star"] == 1


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "graph": "complete:3", "marked": [0], "p": 0.01, "seed": 1,
        "out": str(tmp_path / "ignored"),
    }))
    out = tmp_path / "real"
    code = run(["dqht", "--config", str(cfg), "--seed", "9", "--out", str(out)])
    assert code == 0
    embedded = read_json(out / "dqht_summary.json")["config"]
    assert embedded["seed"] == 9
    assert embedded["p"] == 0.01
    round_tripped = ExperimentConfig.from_json_dict(embedded)
    assert round_tripped.to_json_dict() == embedded


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"graph": "complete:3", "marked": [0], "walrus": 1}))
    assert run(["qht", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_parse_marked_forms():
    assert parse_marked("none", 4) == ()
    assert parse_marked("", 4) == ()
    assert parse_marked("first:2", 4) == (0, 1)
    assert parse_marked("2,0", 4) == (2, 0)
    with pytest.raises(ConfigError):
        parse_marked("first:9", 4)


def test_grid_values_inclusive_endpoint():
    grid = parse_p_grid("0.1:0.2:0.7")
    values = grid_values(grid)
    assert values == pytest.approx([0.1, 0.3, 0.5, 0.7])


def test_build_config_defaults():
    args = build_parser().parse_args(["qht", "--graph", "complete:4", "--marked", "first:1"])
    config = build_config(args)
    assert config.marked == (0,)
    assert config.variant == "bond_flip"
    assert config.mode == "exact"
    assert config.samples == 10_000
