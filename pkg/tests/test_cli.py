import json
import subprocess
import sys

import pytest

from cubesense import boolfn, cli, spectral


def run(argv, capsys):
    code = cli.run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def strip_clock(report):
    return {k: v for k, v in report.items() if k not in cli.WALL_CLOCK_FIELDS}


@pytest.mark.parametrize("table,expected", [("6", (2, 2, 2)), ("8", (2, 2, 2)), ("0", (0, 0, 0))])
def test_measures(table, expected, capsys):
    code, out, _ = run(["measures", table, "--n", "2"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["schema"] == 1
    assert (rep["s"], rep["bs"], rep["deg"]) == expected


def test_measures_bad_hex(capsys):
    code, _, err = run(["measures", "zz", "--n", "2"], capsys)
    assert code == 1 and "error" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.run(["verify", "nothing", "--n", "3"])
    assert exc.value.code == 1


def test_verify_an(capsys, tmp_path):
    out_file = tmp_path / "an.json"
    code, _, _ = run(["verify", "an", "--n", "8", "--out", str(out_file)], capsys)
    rep = json.loads(out_file.read_text())
    assert code == 0 and rep["square_is_nI"] and rep["trace"] == 0 and rep["passed"]


def test_verify_an_corrupted_fixture(capsys, tmp_path):
    lines = spectral.dump_matrix(spectral.build_an(3)).splitlines()
    r, c, v = lines[1].split()
    lines[1] = f"{r} {c} {-int(v)}"
    fixture = tmp_path / "bad.txt"
    fixture.write_text("\n".join(lines) + "\n")
    code, out, _ = run(["verify", "an", "--n", "3", "--matrix", str(fixture)], capsys)
    rep = json.loads(out)
    assert code == 2 and not rep["passed"] and rep["failures"]


def test_verify_an_unparseable_fixture(capsys, tmp_path):
    fixture = tmp_path / "junk.txt"
    fixture.write_text("not a matrix\n")
    code, _, _ = run(["verify", "an", "--n", "3", "--matrix", str(fixture)], capsys)
    assert code == 1


def test_verify_theorem1(capsys):
    code, out, _ = run(["verify", "theorem1", "--n", "4", "--mode", "exhaustive"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["min_delta"] == 2


def test_verify_sdeg(capsys):
    code, out, _ = run(["verify", "sdeg", "--n", "4"], capsys)
    assert code == 0 and boolfn.and_of_ors(2).to_hex() in json.loads(out)["tight_witnesses"]


def test_verify_counterexample_exit(capsys, monkeypatch):
    real = boolfn.batch_local_sensitivity
    monkeypatch.setattr(boolfn, "batch_local_sensitivity", lambda t, n: real(t, n) + 1)
    code, out, _ = run(["verify", "gl", "--n", "3"], capsys)
    assert code == 2 and json.loads(out)["failures"]


def test_random_needs_seed(capsys):
    code, _, err = run(["verify", "theorem1", "--n", "6", "--mode", "random", "--trials", "5"], capsys)
    assert code == 1 and "--seed" in err
    code, out, _ = run(["verify", "theorem1", "--n", "6", "--mode", "random", "--trials", "5", "--ephemeral"],
                       capsys)
    assert code == 0 and isinstance(json.loads(out)["seed"], int)


def test_seeded_reports_are_deterministic(capsys):
    argv = ["verify", "gl", "--n", "6", "--mode", "random", "--trials", "50", "--seed", "3", "--tol", "1e-6"]
    first = json.loads(run(argv, capsys)[1])
    second = json.loads(run(argv, capsys)[1])
    assert strip_clock(first) == strip_clock(second)
    assert first["seed"] == 3 and first["tol"] == 1e-6


def test_out_dir_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(tmp_path))
    run(["verify", "bschain", "--n", "3"], capsys)
    files = list(tmp_path.glob("*.json"))
    assert len(files) == 1 and json.loads(files[0].read_text())["theorem"]


@pytest.mark.parametrize("fmt", ["csv", "human"])
def test_other_formats(fmt, capsys):
    code, out, _ = run(["measures", "e8", "--n", "3", "--format", fmt], capsys)
    assert code == 0 and "deg" in out


@pytest.mark.parametrize("kind,n,size,delta", [("star", 4, 9, 4), ("tight", 4, 9, 2), ("tight", 9, 257, 3)])
def test_witness(kind, n, size, delta, capsys):
    code, out, _ = run(["witness", kind, "--n", str(n)], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["size"] == size and rep["delta_h"] == delta


def test_witness_star_lambda(capsys):
    rep = json.loads(run(["witness", "star", "--n", "4"], capsys)[1])
    assert rep["lambda_induced"] == pytest.approx(2.0, abs=1e-8)


def test_witness_gl_side(capsys):
    rep = json.loads(run(["witness", "gl-side", "--n", "4"], capsys)[1])
    assert rep["gamma"] == 2
    assert run(["witness", "gl-side", "--n", "5"], capsys)[0] == 1


def test_explore_g(capsys):
    rep = json.loads(run(["explore-g", "--n", "4", "--k", "2"], capsys)[1])
    assert rep["exact"] and rep["upper"] == 9


def test_dump_and_spectrum(capsys, tmp_path):
    path = tmp_path / "a2.txt"
    assert cli.run(["dump-an", "--n", "2", "--out", str(path)]) == 0
    assert cli.run(["spectrum", "--matrix", str(path)]) == 0
    values = json.loads(capsys.readouterr().out)["values"]
    assert values == pytest.approx([2 ** 0.5] * 2 + [-(2 ** 0.5)] * 2)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cubesense", "measures", "6", "--n", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["s"] == 2
