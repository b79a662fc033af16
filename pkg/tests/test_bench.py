import json
import math

import pytest

from conjsub.bench.cli import main
from conjsub.bench.experiment import (
    METHODS,
    ConfigError,
    ExperimentConfig,
    TableEntry,
    TableRow,
    config_from_mapping,
    load_config,
    run_experiment,
    solve,
    table_row,
)
from conjsub.bench.report import emit_report, parse_report_csv, read_trace, write_trace
from conjsub.core import IterationRecord


def test_ladder_must_decrease():
    with pytest.raises(ConfigError):
        ExperimentConfig("shor", "csgi", eps_ladder=(0.01, 0.1))
    with pytest.raises(ConfigError):
        ExperimentConfig("shor", "csgi", eps_ladder=(0.1, 0.1))
    with pytest.raises(ConfigError):
        ExperimentConfig("shor", "csgi", eps_ladder=(0.1, -1.0))
    with pytest.raises(ConfigError):
        ExperimentConfig("shor", "csgi", max_evals=0)


@pytest.mark.parametrize(
    "data",
    [
        {"problem": "shor"},
        {"problem": "shor", "method": "newton"},
        {"problem": "nope", "method": "sgm"},
        {"problem": "shor", "method": "sgm", "colour": "red"},
        {"problem": "shor", "method": "sgm", "params": {"lambda": 1}},
        {"problem": "shor", "method": "sgm", "params": {"lambda0": "abc"}},
        {"problem": "shor", "method": "sgm", "x0": [1.0, 2.0]},
        {"problem": "shor", "method": "csgm", "params": {"eta": "cubic:1"}},
    ],
)
def test_bad_configs_rejected(data):
    with pytest.raises(ConfigError):
        solve(config_from_mapping(data, max_evals=10))


def test_load_toml_config(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(
        'problem = "shor"\nmethod = "csgi"\neps = [0.1, 0.01]\nmax_evals = 3000\n'
        "[params]\ntheta = 0.3\nbeta_prime = 0.05\n"
    )
    cfg = load_config(path)
    assert cfg.eps_ladder == (0.1, 0.01)
    assert cfg.method_params == {"theta": 0.3, "beta_prime": 0.05}
    row = run_experiment(cfg)
    assert [e.it for e in row.entries] == [141, 253]


def test_malformed_toml(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("problem = \n")
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")


def test_overrides_take_precedence():
    cfg = config_from_mapping({"problem": "shor", "method": "sgm", "params": {"lambda0": 0.2}},
                              method="csgi", params={"theta": 0.4}, max_evals=50)
    assert cfg.method == "csgi"
    assert cfg.method_params == {"lambda0": 0.2, "theta": 0.4}
    assert cfg.max_evals == 50


def test_csv_round_trip():
    rows = [
        TableRow("sgm", (TableEntry(0.1, 80, 81), TableEntry(1e-4, None, 8243))),
        TableRow("csgi", (TableEntry(0.1, 141, 141), TableEntry(1e-5, 860, None))),
    ]
    text = emit_report(rows, "csv")
    assert text.splitlines()[0] == "method,eps,it,reference_it,ratio"
    assert "sgm,0.0001,-,8243,-" in text
    assert parse_report_csv(text) == rows


def test_markdown_report():
    text = emit_report([TableRow("csgi", (TableEntry(0.01, 250, 253),))], "markdown")
    assert "| csgi | 0.01 | 250 | 253 | 0.988 |" in text
    with pytest.raises(ValueError):
        emit_report([], "csv")
    with pytest.raises(ValueError):
        emit_report([TableRow("x", ())], "html")


def test_ratio():
    assert TableEntry(0.1, 50, 100).ratio == 0.5
    assert TableEntry(0.1, None, 100).ratio is None
    assert TableEntry(0.1, 50, None).ratio is None


def test_trace_round_trip(tmp_path):
    rows = [
        IterationRecord(0, 80.0, 80.0, 3.5, 0.05, ("norm", "descent"), 2, 70.0, -1.0, 0.2, 0.4, 0.07),
        IterationRecord(1, 70.0, 70.0, 1.0, 0.05, (), 3),
    ]
    path = tmp_path / "t.jsonl"
    write_trace(rows, path)
    lines = path.read_text().splitlines()
    assert list(json.loads(lines[0])) == ["k", "f_x", "phi_k", "p_norm", "lam", "events", "eval_count",
                                          "f_y", "gp", "b", "eta", "d"]
    back = read_trace(path)
    assert back[0] == rows[0]
    assert math.isnan(back[1].f_y)


def test_empty_trace(tmp_path):
    path = tmp_path / "empty.jsonl"
    write_trace([], path)
    assert path.read_text() == ""


def test_trace_unwritable(tmp_path):
    with pytest.raises(OSError):
        write_trace([], tmp_path / "no" / "such" / "dir.jsonl")


@pytest.mark.parametrize("method", sorted(METHODS))
def test_trace_files_are_reproducible(tmp_path, method):
    paths = [tmp_path / f"{method}{i}.jsonl" for i in range(2)]
    for p in paths:
        solve(ExperimentConfig("shor", method, max_evals=300, trace_path=str(p)))
    assert paths[0].read_bytes() == paths[1].read_bytes()
    rows = read_trace(paths[0])
    assert rows
    assert all(b.k == a.k + 1 for a, b in zip(rows, rows[1:]))
    assert all(b.eval_count > a.eval_count for a, b in zip(rows, rows[1:]))
    assert all(b.phi_k <= a.phi_k for a, b in zip(rows, rows[1:]))


@pytest.mark.parametrize("method", ["csgi", "sgm", "dasg"])
def test_first_hit_counts_are_exact(method):
    # one evaluation fewer than the reported count must miss that target
    ladder = (0.1, 0.01)
    row = run_experiment(ExperimentConfig("shor", method, eps_ladder=ladder, max_evals=20000))
    for e in row.entries:
        assert e.it is not None
        short = run_experiment(ExperimentConfig("shor", method, eps_ladder=(e.eps,), max_evals=e.it - 1))
        assert short.entries[0].it is None
        exact = run_experiment(ExperimentConfig("shor", method, eps_ladder=(e.eps,), max_evals=e.it))
        assert exact.entries[0].it == e.it


def test_table_row_best_gap():
    cfg = ExperimentConfig("shor", "csgi", eps_ladder=(0.1,), max_evals=500)
    row = table_row(cfg, solve(cfg), references=(141,))
    assert row.entries[0].it == 141
    assert row.entries[0].ratio == 1.0
    assert 0 < row.best_gap <= 0.1


def test_cli_solve_success(capsys):
    code = main(["solve", "--problem", "shor", "--method", "csgi", "--eps", "0.1,0.01", "--max-evals", "2000"])
    out = capsys.readouterr().out
    assert code == 0
    assert "| csgi | 0.1 | 141 | - | - |" in out
    assert "termination  target" in out


def test_cli_solve_not_reached(capsys):
    code = main(["solve", "--problem", "shor", "--method", "sgm", "--eps", "1e-6", "--max-evals", "100"])
    assert code == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--problem", "shor", "--method", "csgi", "--param", "theta=2"],
        ["solve", "--problem", "shor", "--method", "csgi", "--param", "colour=red"],
        ["solve", "--problem", "shor", "--method", "sgm", "--eps", "0.01,0.1"],
        ["solve", "--problem", "shor", "--method", "sgm", "--x0", "1,2"],
        ["solve", "--method", "sgm"],
        ["solve", "--problem", "quadratic", "--method", "sgm", "--dim", "0"],
    ],
)
def test_cli_usage_errors(argv, capsys):
    assert main(argv) == 2
    assert "conjsub:" in capsys.readouterr().err


def test_cli_argparse_errors_exit_two():
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--method", "bogus"])
    assert exc.value.code == 2


def test_cli_config_file_and_trace(tmp_path, capsys):
    trace = tmp_path / "trace.jsonl"
    cfg = tmp_path / "c.toml"
    cfg.write_text('problem = "l1:3"\nmethod = "csgm"\nmax_evals = 200\n')
    assert main(["solve", "--config", str(cfg), "--trace", str(trace), "--format", "csv"]) == 0
    assert len(read_trace(trace)) == 200 - 1


def test_cli_trace_unwritable(tmp_path, capsys):
    code = main(["solve", "--problem", "shor", "--method", "sgm", "--max-evals", "10",
                 "--trace", str(tmp_path / "missing" / "t.jsonl")])
    assert code == 2


def test_cli_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in ("shor", "l1", "csgi", "dasg"):
        assert name in out
