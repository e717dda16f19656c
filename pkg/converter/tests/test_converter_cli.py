import json
import subprocess
import sys

from hyla_converter.cli import main


def test_cli_prints_report(planetoid_dir, tmp_path, capsys):
    rc = main(["--kind", "planetoid", "--in", str(planetoid_dir),
               "--out", str(tmp_path / "out")])
    assert rc == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["name"] == "mini"
    assert rep["nodes"] == 8
    assert (tmp_path / "out" / "meta.json").exists()


def test_cli_error_exits_nonzero(tmp_path, capsys):
    rc = main(["--kind", "planetoid", "--in", str(tmp_path / "nowhere"),
               "--out", str(tmp_path / "out")])
    assert rc == 1
    assert "nowhere" in capsys.readouterr().err


def test_cli_name_flag(planetoid_dir, tmp_path, capsys):
    rc = main(["--kind", "planetoid", "--name", "mini",
               "--in", str(planetoid_dir), "--out", str(tmp_path / "out")])
    assert rc == 0


def test_console_script(text_dir, tmp_path):
    out = subprocess.run(
        ["convert", "--kind", "text_corpus", "--in", str(text_dir),
         "--out", str(tmp_path / "out")],
        capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    assert json.loads(out.stdout)["task"] == "inductive"


def test_module_invocation(text_dir, tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "hyla_converter.cli", "--kind", "text_corpus",
         "--in", str(text_dir), "--out", str(tmp_path / "out")],
        capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
