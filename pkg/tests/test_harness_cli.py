import json
import subprocess
import sys

import numpy as np
import pytest

from modface import harness
from modface.cli import main
from modface.harness import Report, RunConfig, UsageError, run


def run_json(argv, capsys):
    code = main(argv + ["--json"])
    return code, json.loads(capsys.readouterr().out)


def test_replay_is_deterministic():
    cfg = RunConfig("verify-cone", "H", 4, 30, 7)
    assert run(cfg).to_json() == run(cfg).to_json()


def test_workers_do_not_change_the_report():
    serial = run(RunConfig("verify-cone", "C", 3, 40, 3, workers=1))
    threaded = run(RunConfig("verify-cone", "C", 3, 40, 3, workers=4))
    assert serial.to_json() == threaded.to_json()
    for a, b in zip(serial.reports, threaded.reports):
        assert a.residuals == b.residuals


def test_seed_changes_the_trials():
    a = run(RunConfig("verify-cone", "R", 3, 10, 1)).reports[0]
    b = run(RunConfig("verify-cone", "R", 3, 10, 2)).reports[0]
    assert a.residuals != b.residuals


def test_trial_generators_are_independent_of_order():
    x = harness.trial_rng(5, 11, 3).standard_normal(4)
    harness.trial_rng(5, 11, 2).standard_normal(100)
    assert np.array_equal(x, harness.trial_rng(5, 11, 3).standard_normal(4))


def test_report_pass_flag_and_schema():
    rep = Report("x", "R", 3, 10, 0, 1e-12, 0, elapsed=1.5)
    assert rep.passed and "elapsed" not in rep.to_dict()
    assert not Report("x", "R", 3, 10, 2, 1.0, 0).passed
    doc = run(RunConfig("verify-lattice", shape="square")).to_dict()
    assert doc["schema"] == harness.SCHEMA
    assert set(doc) >= {"config", "passed", "reports"}


@pytest.mark.parametrize(
    "cfg",
    [
        RunConfig("verify-cone", "O", 4),
        RunConfig("verify-cone", "O", 3),
        RunConfig("verify-albert", "R", 3),
        RunConfig("frobnicate"),
        RunConfig("verify-cone", "X"),
        RunConfig("verify-cone", n=0),
        RunConfig("verify-cone", trials=0),
        RunConfig("verify-lattice", shape="dodecahedron"),
    ],
)
def test_invalid_configs_are_rejected(cfg):
    with pytest.raises(UsageError):
        cfg.validate()


def test_exit_code_zero_on_success(capsys):
    assert main(["verify-cone", "--field", "H", "--n", "4", "--trials", "20", "--seed", "7"]) == 0
    assert "checks passed" in capsys.readouterr().out


def test_exit_code_one_on_failure(capsys):
    code, doc = run_json(["verify-albert", "--trials", "5", "--tol", "1e-30"], capsys)
    assert code == 1 and doc["passed"] is False
    assert any(r["failures"] for r in doc["reports"])


@pytest.mark.parametrize(
    "argv",
    [
        ["verify-cone", "--field", "O", "--n", "4"],
        ["verify-albert", "--n", "4"],
        ["verify-cone", "--field", "Z"],
        ["no-such-command"],
        ["verify-lattice", "--shape", "dodecahedron"],
    ],
)
def test_exit_code_two_on_usage_error(argv, capsys):
    assert main(argv) == 2
    capsys.readouterr()


def test_cube_witness_in_json(capsys):
    code, doc = run_json(["verify-lattice", "--shape", "cube"], capsys)
    assert code == 0
    (rep,) = [r for r in doc["reports"] if r["check"] == "lattice[cube]"]
    w = rep["witness"]
    assert w["F v (G ^ H)"] != w["(F v G) ^ H"]


def test_r5_reports_full_fidelity(capsys):
    code, doc = run_json(["r5", "report", "--trials", "5"], capsys)
    assert code == 0
    assert len(doc["fidelity"]) == 9 and all(row["match"] for row in doc["fidelity"])
    assert doc["reverse_branch"]["fail_sampled_spans"] == doc["reverse_branch"]["planes"]


def test_text_report_shows_fidelity_table(capsys):
    assert main(["r5", "--trials", "3"]) == 0
    out = capsys.readouterr().out
    assert out.count("[ok]") == 9


def test_sections_demo_text(capsys):
    assert main(["sections", "demo", "--trials", "5"]) == 0
    out = capsys.readouterr().out
    assert "recession rays sampled" in out and "unique parallels" in out


def test_out_writes_report_and_figures(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["all", "--trials", "3", "--out", str(out)]) == 0
    capsys.readouterr()
    doc = json.loads((out / "report.json").read_text())
    assert doc["passed"] is True
    pngs = {p.name for p in out.glob("*.png")}
    assert {"residuals.png", "hasse_cube.png", "r5_faces.png", "r5_factors.png", "section_lines.png"} <= pngs
    assert all((out / name).stat().st_size > 1000 for name in pngs)


def test_environment_seed(monkeypatch, capsys):
    monkeypatch.setenv("MODFACE_SEED", "11")
    _, doc = run_json(["verify-cone", "--trials", "3"], capsys)
    assert doc["config"]["seed"] == 11
    _, doc = run_json(["verify-cone", "--trials", "3", "--seed", "4"], capsys)
    assert doc["config"]["seed"] == 4
    monkeypatch.setenv("MODFACE_SEED", "eleven")
    assert main(["verify-cone", "--trials", "3"]) == 2
    capsys.readouterr()


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "modface.cli", "verify-lattice", "--shape", "square", "--json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["passed"] is True
