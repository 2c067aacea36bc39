import json

import pytest

from rnnbench.cells import CellKind
from rnnbench.cli import apply_override, main, parse_value, preset_config
from rnnbench.dgp import DgpKind

FAST = ["train.max_epochs=2", "grid.hidden_range=1..1", "grid.window_cap=2",
        "grid.runs_per_config=2"]


def test_help_lists_every_process_and_cell(capsys):
    assert main(["--help"]) == 0
    text = capsys.readouterr().out
    for name in [k.value for k in DgpKind] + [k.value for k in CellKind]:
        assert name in text


def test_misspelled_cell_suggests_the_right_name(tmp_path, capsys):
    assert main(["train", "--cell", "LSTM-VANILA", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "Did you mean 'LSTM-VANILLA'" in err and "MGU-SLIM3" in err


def test_unknown_dgp_lists_valid_names(tmp_path, capsys):
    assert main(["bench", "--dgps", "LORENTZ", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "LORENZ" in err and "ARFIMA_d04" in err


def test_unknown_config_key_is_rejected(tmp_path):
    assert main(["bench", "--out", str(tmp_path), "grid.hiden_range=1..2"]) == 1
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"trian": {}}))
    assert main(["bench", "--out", str(tmp_path), "--config", str(cfg)]) == 1


def test_bad_flag_is_a_usage_error(tmp_path):
    assert main(["bench", "--no-such-flag"]) == 1
    assert main([]) == 1


def test_output_directory_falls_back_to_environment(tmp_path, monkeypatch):
    monkeypatch.delenv("RNNBENCH_OUT", raising=False)
    assert main(["catalog"]) == 1
    monkeypatch.setenv("RNNBENCH_OUT", str(tmp_path))
    assert main(["catalog"]) == 0
    assert len(json.loads((tmp_path / "catalog.json").read_text())["cells"]) == 31


def test_override_parsing():
    assert parse_value("1..4") == [1, 2, 3, 4]
    assert parse_value("0.5") == 0.5
    assert parse_value("null") is None
    assert parse_value("ELMAN,GRU") == "ELMAN,GRU"
    cfg = preset_config("desk")
    apply_override(cfg, "train.learning_rate=0.001")
    assert cfg["train"]["learning_rate"] == 0.001


def test_gradcheck_all_passes(tmp_path):
    assert main(["gradcheck", "--all", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "gradcheck.csv").read_text().splitlines()
    assert len(lines) == 32 and all(line.endswith(",ok") for line in lines[1:])


def _bench(out, *extra):
    return main(["bench", "--scale", "desk", "--seed", "7", "--out", str(out), "--jobs", "1",
                 "--cells", "ELMAN,MGU", "--dgps", "T,HENON", "--reps", "1", *FAST, *extra])


def test_bench_writes_report_set_and_repeats_bytewise(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert _bench(a) == 0 and _bench(b) == 0
    for name in ["results.jsonl", "guideline_exp2.csv", "guideline_exp2.md", "summary.csv",
                 "summary.md", "failures.json", "resolved_config.json",
                 "figures/deterministic.csv", "figures/deterministic.svg",
                 "figures/chaotic.csv", "figures/chaotic.svg"]:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    assert json.loads((a / "failures.json").read_text()) == []


def test_resolved_config_reproduces_the_run(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert _bench(a) == 0
    assert main(["bench", "--config", str(a / "resolved_config.json"), "--out", str(b),
                 "--jobs", "1"]) == 0
    assert (a / "results.jsonl").read_bytes() == (b / "results.jsonl").read_bytes()
    assert (a / "resolved_config.json").read_bytes() == (b / "resolved_config.json").read_bytes()


def test_report_rebuilds_from_results(tmp_path):
    a, r = tmp_path / "a", tmp_path / "r"
    assert _bench(a) == 0
    assert main(["report", "--results", str(a / "results.jsonl"), "--out", str(r)]) == 0
    for name in ["summary.csv", "guideline_exp2.csv", "figures/chaotic.csv"]:
        assert (a / name).read_bytes() == (r / name).read_bytes()


def test_report_without_results_is_a_usage_error(tmp_path):
    assert main(["report", "--out", str(tmp_path)]) == 1


def test_generate_train_and_grid_commands(tmp_path):
    assert main(["generate", "--out", str(tmp_path), "--dgps", "SAR2,HENON", "--reps", "2"]) == 0
    assert (tmp_path / "series" / "HENON_rep01.csv").exists()
    assert main(["train", "--out", str(tmp_path), "--cell", "GRU", "--dgp", "TRW",
                 "--n-h", "2", "--w", "3", "train.max_epochs=2"]) == 0
    res = json.loads((tmp_path / "train_result.json").read_text())
    assert len(res["train_curve"]) == 2 and res["test_rmse"] > 0
    assert main(["grid", "--out", str(tmp_path), "--cell", "ELMAN", "--dgp", "SS", *FAST]) == 0
    assert len((tmp_path / "grid.csv").read_text().splitlines()) == 3


@pytest.mark.parametrize("bad", ["experiment=3", "split.train=10", "train.batch_size=0"])
def test_invalid_values_are_usage_errors(tmp_path, bad):
    assert main(["bench", "--out", str(tmp_path), bad]) == 1
