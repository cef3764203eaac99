"""
Command-line tests: sub-commands, exit codes and byte-stable output
"""

import json

import pandas as pd
import pytest

import main
from cli.handlers.commands import RunConfig, exit_code_for
from core.integration import QuadratureError

SMALL = ["--t-max", "50", "--n-steps", "500", "--grid", "5"]


def run(capsys, *argv):
    code = main.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


# analyze

def test_analyze_prints_report(capsys):
    code, out = run(capsys, "analyze", "--catalog", "convergent-1", *SMALL, "--tol", "0.1")
    assert code == 0
    report = json.loads(out)
    assert report["function"] == "convergent-1"
    assert report["mode"] == "integral"
    assert report["plan"]["t_max"] == 50.0
    assert report["integral_limit"]["status"] in ("converged", "diverged", "inconclusive")


def test_analyze_expression_function(capsys):
    code, out = run(capsys, "analyze", "--lower", "alpha/(1+x)^2", "--upper", "(2-alpha)/(1+x)^2", *SMALL)
    assert code == 0
    assert json.loads(out)["function"]


def test_analyze_function_mode(capsys):
    code, out = run(capsys, "analyze", "--catalog", "pointwise-convergent", "--function-mode", *SMALL)
    assert code == 0
    assert json.loads(out)["mode"] == "function"


def test_output_is_byte_identical_across_runs(capsys):
    first = run(capsys, "analyze", "--catalog", "paper-example-1", *SMALL)
    second = run(capsys, "analyze", "--catalog", "paper-example-1", *SMALL)
    assert first == second


def test_report_to_file_prints_table(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, out = run(capsys, "analyze", "--catalog", "convergent-1", *SMALL, "--out", str(path))
    assert code == 0
    assert json.loads(path.read_text())["function"] == "convergent-1"
    assert "integral_limit" in out and "cesaro_limit" in out


# check

def test_check_runs_trace_checkers_by_default(capsys):
    code, out = run(capsys, "check", "--catalog", "paper-example-2", *SMALL)
    assert code == 0
    names = [outcome["name"] for outcome in json.loads(out)["checkers"]]
    assert names == ["condition-star", "condition-doublestar", "slow-decrease", "backward-slow-decrease"]


def test_check_finds_counterexample(capsys):
    code, out = run(capsys, "check", "--catalog", "paper-example-1", "--slow-decrease",
                    "--eps", "0.5", "--lambda", "1.5", *SMALL)
    assert code == 0
    [outcome] = json.loads(out)["checkers"]
    assert outcome["outcome"] == "counterexample"
    assert outcome["witness"]["margin"] < 0
    assert outcome["params"]["eps"] == 0.5


def test_check_landau(capsys):
    code, out = run(capsys, "check", "--catalog", "landau-negative", "--landau", "--u0", "-1", *SMALL)
    assert code == 0
    [outcome] = json.loads(out)["checkers"]
    assert outcome["name"] == "landau"
    assert outcome["outcome"] == "no-counterexample"
    assert outcome["params"]["H"] == 1.0


def test_check_all_includes_landau_only_with_a_bound(capsys):
    _, out = run(capsys, "check", "--catalog", "landau-negative", "--all", *SMALL)
    assert "landau" not in [outcome["name"] for outcome in json.loads(out)["checkers"]]
    _, out = run(capsys, "check", "--catalog", "landau-negative", "--all", "--u0", "-1", *SMALL)
    assert json.loads(out)["checkers"][-1]["name"] == "landau"


def test_check_landau_from_json_bound(capsys, tmp_path):
    bound = tmp_path / "u.json"
    levels = [0.0, 0.25, 0.5, 0.75, 1.0]
    bound.write_text(json.dumps({"alpha": levels, "lower": [-2.0] * 5, "upper": [-1.0] * 5}))
    code, out = run(capsys, "check", "--catalog", "landau-negative", "--landau", "--u-json", str(bound), *SMALL)
    assert code == 0
    assert json.loads(out)["checkers"][0]["params"]["H"] == 2.0


# export

def test_export_csv_layout(capsys, tmp_path):
    path = tmp_path / "trace.csv"
    code, out = run(capsys, "export", "--catalog", "crisp-constant(0)", *SMALL, "--format", "csv", "--out", str(path))
    assert code == 0
    assert out.strip() == str(path)
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["t", "alpha", "s_lower", "s_upper", "sigma_lower", "sigma_upper"]
    assert len(frame) == 501 * 5
    assert (frame[["s_lower", "s_upper"]] == 0.0).all().all()
    assert frame.loc[frame["t"] == 0.0, "sigma_lower"].isna().all()
    assert (frame.loc[frame["t"] > 0.0, ["sigma_lower", "sigma_upper"]] == 0.0).all().all()


def test_export_both_formats(capsys, tmp_path):
    stem = tmp_path / "trace"
    code, out = run(capsys, "export", "--catalog", "convergent-1", *SMALL, "--format", "both", "--out", str(stem))
    assert code == 0
    assert (tmp_path / "trace.csv").exists() and (tmp_path / "trace.json").exists()
    assert len(out.splitlines()) == 2


def test_export_files_are_byte_identical(capsys, tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (first, second):
        run(capsys, "export", "--catalog", "paper-example-1", *SMALL, "--format", "csv", "--out", str(path))
    assert first.read_bytes() == second.read_bytes()


# catalog

def test_catalog_lists_builtin_functions(capsys):
    code, out = run(capsys, "catalog")
    assert code == 0
    names = [entry["name"] for entry in json.loads(out)]
    assert "paper-example-1" in names and "landau-negative" in names


# Exit codes

@pytest.mark.parametrize("argv", [
    ["export", "--catalog", "convergent-1", "--n-steps", "1"],
    ["analyze", "--lower", "1", "--upper", "0", *SMALL],
    ["analyze", "--lower", "ln(x - 1)", "--upper", "ln(x - 1) + 1", *SMALL],
    ["analyze", "--lower", "cos(x", "--upper", "cos(x)", *SMALL],
    ["analyze", "--catalog", "paper-example-1", "--lower", "x", "--upper", "x", *SMALL],
    ["analyze", "--lower", "alpha", *SMALL],
    ["analyze", *SMALL],
    ["analyze", "--catalog", "paper-example-3", *SMALL],
    ["check", "--catalog", "paper-example-1", "--landau", *SMALL],
    ["check", "--catalog", "paper-example-1", "--lambda", "1.0", *SMALL],
    ["check", "--catalog", "landau-negative", "--landau", "--u0", "1", *SMALL],
    ["check", "--catalog", "paper-example-1", "--t0", "1000", *SMALL],
])
def test_validation_failures_exit_2(capsys, argv):
    code, out = run(capsys, *argv)
    assert code == 2
    assert out == ""


@pytest.mark.parametrize("argv", [
    ["catalog", "--catalog-file", "{missing}"],
    ["analyze", "--catalog", "convergent-1", "--catalog-file", "{missing}", *SMALL],
    ["check", "--catalog", "landau-negative", "--landau", "--u-json", "{missing}", *SMALL],
])
def test_missing_input_files_exit_2(capsys, tmp_path, argv):
    missing = str(tmp_path / "absent.json")
    code, out = run(capsys, *[arg.replace("{missing}", missing) for arg in argv])
    assert code == 2
    assert out == ""


def test_unwritable_output_exits_4(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _ = run(capsys, "export", "--catalog", "convergent-1", *SMALL, "--format", "csv",
                  "--out", str(blocker / "trace.csv"))
    assert code == 4


def test_exit_code_mapping():
    assert exit_code_for(QuadratureError("budget")) == 3
    assert exit_code_for(PermissionError("denied")) == 4
    assert exit_code_for(ValueError("bad")) == 2
    assert exit_code_for(RuntimeError("boom")) == 1


def test_run_config_is_frozen():
    config = RunConfig(command="analyze", catalog="convergent-1")
    with pytest.raises(Exception):
        config.t_max = 10.0
    assert config.plan().t_max == config.t_max
