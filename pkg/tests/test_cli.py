import csv
import io
import json
import subprocess
import sys

import pytest

from dynamon.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_PASS, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gleason_sweeps(capsys):
    code, out, _ = run(capsys, "gleason", "--d", "2", "--b-max", "8")
    rep = json.loads(out)
    assert code == EXIT_PASS and rep["schema"] == "dynamon/1"
    assert [r["b"] for r in rep["rows"]] == list(range(1, 9))
    assert all(r["squarefree"] for r in rep["rows"])
    code, out, _ = run(capsys, "gleason", "--d", "6", "--b-max", "4")
    assert code == EXIT_PASS
    assert json.loads(out)["rows"][-1]["derivative_is_one_mod_p"] == {"2": True, "3": True}


def test_gleason_budget_exit(capsys):
    code, out, err = run(capsys, "gleason", "--d", "2", "--b-max", "40")
    assert code == EXIT_BUDGET and out == "" and "budget" in err


def test_moves_pair_and_survey(capsys):
    code, out, _ = run(capsys, "moves", "--d", "2", "--n", "2", "--b", "1", "--pair", "[1,1,1]", "[0,1,1]")
    rep = json.loads(out)
    assert code == EXIT_PASS and rep["validation"]["ok"]
    assert rep["certificate"]["steps"] == [{"op": "replace", "j": 0, "new_value": "0", "chart": 2}]
    code, out, _ = run(capsys, "moves", "--d", "2", "--n", "2", "--a", "1", "--b", "1", "--survey", "50",
                       "--seed", "9")
    rep = json.loads(out)
    assert code == EXIT_PASS and rep["success_rate"] == 1.0 and rep["config"]["seed"] == 9


def test_moves_type_mismatch_is_usage(capsys):
    code, _, err = run(capsys, "moves", "--d", "2", "--n", "2", "--b", "2", "--pair", "[1/3,1,1]", "[1,1,1]")
    assert code == EXIT_USAGE and "type" in err


def test_monodromy_example(capsys):
    code, out, _ = run(capsys, "monodromy", "--d", "2", "--b", "3", "--loops", "40", "--seed", "7")
    rep = json.loads(out)
    assert code == EXIT_PASS and rep["order"] == "36"


def test_monodromy_prep1(capsys):
    code, out, _ = run(capsys, "monodromy", "--d", "3", "--b", "1", "--prep1")
    assert code == EXIT_PASS and json.loads(out)["preimage_cycle_type"] == [2]


def test_padic_example(capsys):
    code, out, _ = run(capsys, "padic", "--p", "2", "--d", "2", "--c", "2", "--x", "0", "--prec", "8")
    rep = json.loads(out)
    assert code == EXIT_PASS
    head, residue = rep["coordinates"][0]["point"][0].split(":")
    assert head == "2^8" and int(residue) % 16 == 6
    code, out, _ = run(capsys, "padic", "--p", "2", "--d", "2", "--c", "2,3", "--x", "0,0", "--prec", "4")
    assert code == EXIT_PASS and json.loads(out)["product"]["period"] == 2


def test_padic_usage_errors(capsys):
    assert run(capsys, "padic", "--p", "3", "--d", "2", "--c", "1", "--x", "0")[0] == EXIT_USAGE
    assert run(capsys, "padic", "--p", "2", "--d", "2", "--c", "1,2", "--x", "0")[0] == EXIT_USAGE


def test_ffdyn_actions(capsys):
    code, out, _ = run(capsys, "ffdyn", "survey", "--p", "2", "--d", "2", "--curve", "diag", "--k-max", "12")
    assert code == EXIT_PASS and json.loads(out)["records"] >= 4
    code, out, _ = run(capsys, "ffdyn", "census", "--p", "2", "--d", "2")
    assert code == EXIT_PASS and json.loads(out)["distinct_periods"] >= 20
    code, out, _ = run(capsys, "ffdyn", "fibers", "--p", "2", "--d", "2", "--k", "4")
    assert code == EXIT_PASS
    code, out, _ = run(capsys, "ffdyn", "orbit", "--p", "2", "--k", "2", "--d", "2", "--c", "0", "--x", "2")
    rep = json.loads(out)
    assert code == EXIT_PASS and (rep["preperiod"], rep["period"]) == (0, 2)
    assert run(capsys, "ffdyn", "orbit", "--p", "2", "--k", "2", "--d", "2", "--c", "9", "--x", "0")[0] == EXIT_USAGE
    assert run(capsys, "ffdyn", "survey", "--p", "2", "--d", "2", "--k-max", "21")[0] == EXIT_BUDGET


def test_survey_csv(capsys):
    code, out, _ = run(capsys, "ffdyn", "survey", "--p", "2", "--d", "2", "--k-max", "6", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code in (EXIT_PASS, EXIT_FAIL)
    assert [int(r["k"]) for r in rows] == list(range(1, 7))
    assert rows[1]["t_count"] == "4"


def test_usage_errors(capsys):
    assert run(capsys, "gleason", "--d", "2")[0] == EXIT_USAGE
    assert run(capsys, "nonsense")[0] == EXIT_USAGE
    assert run(capsys, "gleason", "--d", "2", "--b", "2", "--jobs", "0")[0] == EXIT_USAGE
    assert run(capsys, "moves", "--d", "2", "--n", "2", "--b", "1", "--pair", "[1,x]", "[1,1,1]")[0] == EXIT_USAGE
    assert run(capsys, "padic", "--p", "2", "--d", "2", "--c", "1", "--x", "0", "--format", "xml")[0] == EXIT_USAGE


@pytest.mark.parametrize("argv", [
    ["moves", "--d", "3", "--n", "2", "--a", "1", "--b", "1", "--survey", "30", "--seed", "4"],
    ["monodromy", "--d", "2", "--b", "2", "--loops", "10", "--seed", "5"],
])
def test_determinism(capsys, argv):
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_jobs_do_not_change_report(capsys):
    argv = ["monodromy", "--d", "2", "--b", "2", "--loops", "8", "--seed", "1"]
    _, serial, _ = run(capsys, *argv)
    _, parallel, _ = run(capsys, *argv, "--jobs", "2")
    a, b = json.loads(serial), json.loads(parallel)
    a["config"].pop("jobs"), b["config"].pop("jobs")
    assert a == b


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# survey settings\nd = 2\nn = 2\na = 1\nb = 1\nsurvey = 20\nseed = 9\n")
    code, out, _ = run(capsys, "moves", "--config", str(cfg))
    rep = json.loads(out)
    assert code == EXIT_PASS and rep["config"]["seed"] == 9
    code, out, _ = run(capsys, "moves", "--config", str(cfg), "--seed", "3")
    assert json.loads(out)["config"]["seed"] == 3
    bad = tmp_path / "bad.cfg"
    bad.write_text("no equals sign\n")
    assert run(capsys, "moves", "--config", str(bad))[0] == EXIT_USAGE


def test_out_path(tmp_path, capsys):
    target = tmp_path / "rep.json"
    code, out, _ = run(capsys, "gleason", "--d", "3", "--b", "3", "--out", str(target))
    assert code == EXIT_PASS and out == ""
    assert json.loads(target.read_text())["rows"][0]["degree"] == 9


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dynamon", "ffdyn", "orbit", "--p", "2", "--k", "1", "--d", "2",
                           "--c", "0", "--x", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["period"] == 1
