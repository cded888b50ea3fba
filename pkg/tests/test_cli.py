import json
import subprocess
import sys

import pytest

from fairaudit.cli import main


@pytest.fixture
def demo_csv(tmp_path):
    path = tmp_path / "demo.csv"
    assert main(["demo", "--n", "1500", "--seed", "7", "--fnr-gap", "0.2", "-o", str(path)]) == 0
    return path


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


BASE = ["--outcome", "y", "--group", "g", "--probs", "p"]


def test_full_report(demo_csv, capsys):
    code, out, err = run(["--input", demo_csv, *BASE, "--cutoff", 0.41, "--alpha", 0.05,
                          "--seed", 7, "--bootstrap", 200], capsys)
    assert code == 0, err
    assert "Performance" in out and "Fairness" in out
    assert "Treatment Equality" in out
    assert "Conditional Statistical Parity" not in out


def test_conditional_report(demo_csv, capsys):
    code, out, _ = run(["--input", demo_csv, *BASE, "--condition-col", "age", "--condition", ">=60",
                        "--bootstrap", 100], capsys)
    assert code == 0
    assert "Conditional Statistical Parity" in out
    assert "condition: age >= 60" in out


def test_single_metric_verdict(demo_csv, capsys):
    code, out, _ = run(["--input", demo_csv, *BASE, "--metric", "equal_opportunity",
                        "--bootstrap", 200], capsys)
    assert code == 0
    assert out.splitlines()[0] == "There is evidence that the model does not satisfy equal opportunity."


def test_json_output(demo_csv, capsys):
    code, out, _ = run(["--input", demo_csv, *BASE, "--output", "json", "--bootstrap", 50], capsys)
    assert code == 0
    data = json.loads(out)
    assert len(data["fairness"]) == 10


def test_json_input(tmp_path, capsys):
    rows = [{"y": i % 2, "grp": "F" if i % 3 else "M", "score": (i % 10) / 10} for i in range(60)]
    path = tmp_path / "in.json"
    path.write_text(json.dumps(rows))
    code, out, err = run(["--input", path, "--outcome", "y", "--group", "grp", "--probs", "score",
                          "--bootstrap", 50, "--metric", "brier_score_parity"], capsys)
    assert code == 0, err
    assert "GroupF" in out


def test_reference_group_flag(demo_csv, capsys):
    code, out, _ = run(["--input", demo_csv, *BASE, "--reference-group", "A", "--bootstrap", 20], capsys)
    assert code == 0
    assert "groups: B vs A (reference)" in out


def test_three_groups_exit_2(tmp_path, capsys):
    path = tmp_path / "three.csv"
    path.write_text("y,g,p\n1,A,0.9\n0,B,0.1\n1,C,0.3\n")
    code, out, err = run(["--input", path, *BASE], capsys)
    assert code == 2
    assert out == ""
    assert len(err.strip().splitlines()) == 1
    assert "GroupCardinality" in err


@pytest.mark.parametrize(
    "extra, code_name",
    [
        (["--condition", ">=60"], "InvalidParameter"),
        (["--condition-col", "age", "--condition", ">>60"], "UnparsableCondition"),
        (["--condition-col", "age", "--condition", ">=200"], "EmptySubgroup"),
        (["--condition-col", "height", "--condition", ">=2"], "MissingColumn"),
        (["--cutoff", "1.5"], "InvalidParameter"),
        (["--alpha", "0"], "InvalidParameter"),
        (["--threads", "0"], "InvalidParameter"),
    ],
)
def test_validation_errors_exit_2(demo_csv, capsys, extra, code_name):
    code, _, err = run(["--input", demo_csv, *BASE, "--bootstrap", 20, *extra], capsys)
    assert code == 2
    assert code_name in err


def test_missing_file_exit_2(tmp_path, capsys):
    code, _, err = run(["--input", tmp_path / "nope.csv", *BASE], capsys)
    assert code == 2 and "cannot read" in err


def test_inference_error_exit_3(tmp_path, capsys):
    path = tmp_path / "hand.csv"
    path.write_text("y,g,p\n1,A,0.9\n1,A,0.3\n0,A,0.7\n0,A,0.2\n1,B,0.8\n1,B,0.6\n0,B,0.4\n0,B,0.1\n")
    code, _, err = run(["--input", path, *BASE, "--metric", "treatment_equality"], capsys)
    assert code == 3
    assert "UndefinedPointEstimate" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--input", "x.csv"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["--input", "x.csv", *BASE, "--metric", "demographic_parity"])
    assert exc.value.code == 2


def test_demo_to_stdout(capsys):
    code, out, _ = run(["demo", "--n", "20", "--seed", "1"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "y,g,p,age"
    assert len(out.splitlines()) == 21


def test_demo_invalid_exit_2(capsys):
    code, _, err = run(["demo", "--n", "5"], capsys)
    assert code == 2 and "InvalidPlantedParameters" in err


def test_console_entry_point(demo_csv):
    proc = subprocess.run(
        [sys.executable, "-m", "fairaudit", "--input", str(demo_csv), *BASE,
         "--bootstrap", "50", "--metric", "statistical_parity"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert "Positive Prediction Rate" in proc.stdout
