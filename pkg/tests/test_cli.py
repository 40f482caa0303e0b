import json
import subprocess
import sys

import pytest

from udwcov import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_comoving_zero(capsys):
    code, out, _ = run(capsys, "eval", "--v", "0", "--t-over-ell", "1", "--omega-t", "1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# udwcov-csv v1"
    assert lines[1] == "v,t_over_ell,omega_t,im_value,err,path,seconds"
    row = cli.read_csv(out)[0]
    assert row["im_value"] == 0 and row["err"] == 0


def test_eval_pointlike_zero(capsys):
    code, out, _ = run(capsys, "eval", "--v", "0.9", "--omega", "2", "--t-switch", "3", "--pointlike")
    assert code == 0
    row = cli.read_csv(out)[0]
    assert row["im_value"] == 0 and row["path"] == "pointlike"


def test_eval_dimensional_matches_dimensionless(capsys):
    _, a, _ = run(capsys, "eval", "--v", "0.6", "--omega", "0.5", "--t-switch", "2", "--ell", "0.2",
                  "--no-timing")
    _, b, _ = run(capsys, "eval", "--v", "0.6", "--t-over-ell", "10", "--omega-t", "1",
                  "--path", "dimensionless", "--no-timing")
    assert cli.read_csv(a)[0]["im_value"] == pytest.approx(cli.read_csv(b)[0]["im_value"], rel=1e-6)


@pytest.mark.parametrize("argv", [
    ["eval", "--v", "1.0", "--t-over-ell", "1", "--omega-t", "1"],
    ["eval", "--v", "2", "--t-over-ell", "1", "--omega-t", "1"],
    ["eval", "--v", "0.5", "--t-over-ell", "0", "--omega-t", "1"],
    ["eval", "--v", "0.5", "--t-over-ell", "1", "--omega-t", "1", "--path", "bogus"],
    ["eval", "--v", "0.5", "--omega", "1"],
    ["sweep", "--v", "", "--t-over-ell", "1", "--omega-t", "1"],
    ["sweep", "--v", "0.5", "--t-over-ell", "x", "--omega-t", "1"],
    ["eval", "--v", "0.5", "--t-over-ell", "1", "--omega-t", "1", "--mc-samples", "10"],
    [],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert "usage" in err


def test_nonconvergence_exit_code(capsys):
    code, out, _ = run(capsys, "sweep", "--v", "0.6", "--t-over-ell", "1", "--omega-t", "1",
                       "--max-subdivisions", "3", "--no-timing")
    assert code == 2
    row = cli.read_csv(out)[0]
    assert row["path"] == "ei2d:nonconverged" and row["im_value"] != 0


def test_sweep_rows_and_formats(capsys):
    argv = ["sweep", "--v", "0.3,0.6", "--t-over-ell", "1", "--omega-t", "0.5", "2", "--no-timing"]
    code, csv_out, _ = run(capsys, *argv)
    assert code == 0
    rows = cli.read_csv(csv_out)
    assert len(rows) == 4
    assert [(r["v"], r["omega_t"]) for r in rows] == [(0.3, 0.5), (0.3, 2.0), (0.6, 0.5), (0.6, 2.0)]
    _, json_out, _ = run(capsys, *argv, "--format", "json")
    doc = json.loads(json_out)
    assert doc["format"] == "udwcov-json v1"
    assert doc["rows"] == rows


def test_sweep_byte_identical(capsys, tmp_path):
    argv = ["sweep", "--v", "0.9", "--t-over-ell", "1", "--omega-t", "1", "--no-timing"]
    run(capsys, *argv, "--out", str(tmp_path / "a.csv"))
    run(capsys, *argv, "--out", str(tmp_path / "b.csv"))
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_sweep_jobs_do_not_change_numbers(capsys):
    argv = ["sweep", "--v", "0.3", "0.9", "--t-over-ell", "1", "--omega-t", "1", "--no-timing"]
    _, one, _ = run(capsys, *argv)
    _, two, _ = run(capsys, *argv, "--jobs", "2")
    assert one == two


def test_mc_path_seeded(capsys):
    argv = ["eval", "--v", "0.6", "--t-over-ell", "1", "--omega-t", "1", "--path", "mc",
            "--mc-samples", "20000", "--seed", "5", "--no-timing"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# point\nv = 0.3\nt-over-ell = 1\nomega_t = 0.5\nno-timing = true\n")
    _, from_file, _ = run(capsys, "eval", "--config", str(cfg))
    _, flags, _ = run(capsys, "eval", "--v", "0.3", "--t-over-ell", "1", "--omega-t", "0.5", "--no-timing")
    assert from_file == flags
    _, override, _ = run(capsys, "eval", "--config", str(cfg), "--v", "0")
    assert cli.read_csv(override)[0]["v"] == 0.0


def test_config_file_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("speed = 0.3\n")
    assert run(capsys, "eval", "--config", str(cfg))[0] == 1


def test_validate_quick_passes(capsys):
    code, out, _ = run(capsys, "validate", "--grid", "quick")
    assert code == 0, out
    assert out.count("[ok]") == 3


def test_validate_detects_wrong_constant(capsys):
    code, out, _ = run(capsys, "validate", "--grid", "quick", "--inject-constant-error", "1.01")
    assert code == 3
    assert "offending point" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "udwcov", "eval", "--v", "0", "--t-over-ell", "1",
                           "--omega-t", "1", "--format", "json", "--no-timing"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["rows"][0]["im_value"] == 0
