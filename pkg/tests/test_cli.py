import json

import pytest

from lastexit.cli import main
from lastexit.errors import EmbeddingFailed

CONFIG = """
[model]
family = "exp_power"
v = 1.0
q = 1.0
alpha = 1.0

[run]
eps_list = [0.3, 0.2]
n_paths = 200
master_seed = 3
"""


@pytest.fixture
def config(tmp_path):
    f = tmp_path / "c.toml"
    f.write_text(CONFIG)
    return f


def test_run_and_report(config, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", str(config), "--set", f"run.output_dir='{out}'"]) == 0
    assert (out / "summary.json").exists()
    text = capsys.readouterr().out
    assert "r_med" in text
    code = main(["report", str(out)])
    assert code in (0, 4)
    assert main(["report", str(out), "--ks-threshold", "1.0", "--slack", "1.0"]) == 0
    assert main(["report", str(out), "--ks-threshold", "0.0"]) == 4


def test_config_errors(config, tmp_path):
    assert main(["run", str(tmp_path / "nope.toml")]) == 2
    assert main(["run", str(config), "--set", "run.n_paths=5"]) == 2
    assert main(["run", str(config), "--set", "model.alpha=1.5"]) == 2
    assert main(["report", str(tmp_path / "empty")]) == 2


def test_embedding_failure_exit_code(config, tmp_path, monkeypatch, capsys):
    import lastexit.experiment as experiment

    def fail(*args, **kw):
        raise EmbeddingFailed("indefinite", worst_ratio=-0.1)

    monkeypatch.setattr(experiment, "build_embedding", fail)
    assert main(["run", str(config), "--set", f"run.output_dir='{tmp_path / 'o'}'"]) == 3
    assert "eps=0.3" in capsys.readouterr().err


def test_check_lemma3(capsys):
    assert main(["check-lemma3", "--alpha", "1", "--eps", "0.1,0.01"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "eps,lhs,rhs,ratio,flags"
    assert len(lines) == 3


def test_check_slepian(capsys):
    assert main(["check-slepian", "--cases", "3", "--dim", "3", "--samples", "100000"]) == 0
    assert "hard_fail=0" in capsys.readouterr().out


def test_check_tail(capsys):
    assert main(["check-tail", "--paths", "2000", "--eta", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "tail_approx=0.00535321" in out
