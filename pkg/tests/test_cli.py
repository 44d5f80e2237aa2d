import json
import subprocess
import sys

import pytest

from unitary_borcherds.artifacts import reparse
from unitary_borcherds.cli import COMMANDS, EXIT_CONFIG, EXIT_OK, main
from unitary_borcherds.qseries import QExp

from conftest import CONFIGS

D3N3 = str(CONFIGS["d3_n3"])
WRITERS = [(g, a) for g, actions in COMMANDS.items() for a in actions if g != "verify"]


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


@pytest.mark.parametrize("group,action", WRITERS)
def test_writer_commands_round_trip(tmp_path, group, action):
    assert run(tmp_path, group, action, "--config", D3N3) == EXIT_OK
    files = sorted(p for p in tmp_path.iterdir())
    assert files
    for p in files:
        text = p.read_text()
        assert reparse(p.name, text) == text


@pytest.mark.parametrize("group,action", [("lattice", "theta"), ("borcherds", "fj"), ("green", "xi"),
                                          ("weak", "admissible")])
def test_output_is_deterministic(tmp_path, group, action):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, group, action, "--config", D3N3) == EXIT_OK
    assert run(b, group, action, "--config", D3N3) == EXIT_OK
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_theta_order_option(tmp_path):
    assert run(tmp_path, "lattice", "theta", "--config", D3N3, "--order", "7") == EXIT_OK
    th = QExp.parse((tmp_path / "theta_L0.txt").read_text())
    assert th.prec == 7 and th.coefficient(1) == 6


def test_gamma_output(tmp_path):
    assert run(tmp_path, "chars", "gamma", "--config", D3N3) == EXIT_OK
    obj = json.loads((tmp_path / "gamma.json").read_text())
    assert obj["inv_p"] == {"3": -1}
    assert obj["gamma_p"]["3"]["i_power"] == 1


def bad_config(tmp_path, **changes):
    data = json.loads(CONFIGS["d3_n3"].read_text())
    base = CONFIGS["d3_n3"].parent
    data["L0"] = str((base / data["L0"]).resolve())
    data["L_s"] = [str((base / p).resolve()) for p in data.get("L_s", [])]
    data.update(changes)
    path = tmp_path / "job.json"
    path.write_text(json.dumps(data))
    return str(path)


@pytest.mark.parametrize("changes", [{"D": 1}, {"D": 5}, {"D": 12}, {"n": 2}, {"M": -1},
                                     {"inv_p": {"3": 2}}, {"L0": "/nonexistent.json"}])
def test_config_errors_exit_2(tmp_path, capsys, changes):
    cfg = bad_config(tmp_path, **changes)
    assert run(tmp_path / "out", "lattice", "theta", "--config", cfg) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_lattice_mismatch_exits_2(tmp_path):
    cfg = bad_config(tmp_path, n=4)
    assert run(tmp_path / "out", "lattice", "theta", "--config", cfg) == EXIT_CONFIG


def test_missing_and_unreadable_config(tmp_path):
    assert run(tmp_path, "lattice", "theta") == EXIT_CONFIG
    assert run(tmp_path, "lattice", "theta", "--config", str(tmp_path / "none.json")) == EXIT_CONFIG
    (tmp_path / "broken.json").write_text("{")
    assert run(tmp_path, "lattice", "theta", "--config", str(tmp_path / "broken.json")) == EXIT_CONFIG


def test_bad_numeric_options(tmp_path):
    assert run(tmp_path, "lattice", "theta", "--config", D3N3, "--threads", "0") == EXIT_CONFIG
    assert run(tmp_path, "lattice", "theta", "--config", D3N3, "--order", "0") == EXIT_CONFIG


def test_unknown_command_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["lattice", "nope"])
    assert exc.value.code == 2


def test_verify_single_config(tmp_path, capsys):
    assert run(tmp_path, "verify", "all", "--config", D3N3) == EXIT_OK
    out = capsys.readouterr().out
    assert "ALL PASS" in out and "FAIL " not in out
    assert out.startswith((tmp_path / "verify.txt").read_text())


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "unitary_borcherds", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "lattice" in res.stdout
