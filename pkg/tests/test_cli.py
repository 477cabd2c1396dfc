import pytest

from paprhad.cli import main


def test_validate_defaults(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("K=8 N=4 M=64")
    assert "users = 8" in out


def test_validate_overrides(capsys):
    assert main(["validate", "--seed", "5", "--realizations", "10"]) == 0
    assert "J=10 seed=5" in capsys.readouterr().out


def test_missing_config_exit_1(tmp_path, capsys):
    path = tmp_path / "missing.toml"
    assert main(["run", "--config", str(path)]) == 1
    assert str(path) in capsys.readouterr().err


def test_invalid_config_exit_1(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("users = -1\n")
    assert main(["validate", "--config", str(path)]) == 1


def test_bad_arguments_exit_1(capsys):
    assert main(["run", "--format", "xml"]) == 1
    assert main([]) == 1


def test_run_writes_results_and_figure(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text("mu_rls = [-1.0, 0.1]\nmu_rzf = [-1.0, 0.1]\n")
    out = tmp_path / "res.csv"
    code = main(["run", "--config", str(cfg), "--realizations", "3", "--output", str(out),
                 "--curves", str(tmp_path / "c.dat")])
    assert code == 0
    assert len(out.read_text().splitlines()) == 5
    assert (tmp_path / "res.png").exists() and (tmp_path / "c.dat").exists()


def test_run_json_without_figure(tmp_path):
    out = tmp_path / "res.json"
    code = main(["run", "--realizations", "2", "--format", "json", "--output", str(out), "--no-figure"])
    assert code == 0 and out.exists() and not (tmp_path / "res.png").exists()


def test_runtime_error_exit_2(tmp_path):
    blocker = tmp_path / "f"
    blocker.write_text("")
    code = main(["run", "--realizations", "1", "--output", str(blocker / "x.csv"), "--no-figure"])
    assert code == 2


@pytest.mark.slow
def test_oracle_exit_code_reflects_checks(capsys):
    code = main(["oracle"])
    out = capsys.readouterr().out
    lines = [line for line in out.splitlines() if line.startswith(("PASS", "FAIL"))]
    assert len(lines) >= 10
    assert code == (0 if all(line.startswith("PASS") for line in lines) else 1)
