from __future__ import annotations

import io
import itertools
import math

import pytest
from hypothesis import given, strategies as st

from cpburgers import cli
from cpburgers.errors import ParameterError
from cpburgers.manufactured import ConvergenceReport, ConvergenceRow


def test_empty_config_gives_defaults():
    cfg = cli.parse_config()
    assert cfg == cli.RunConfig()
    assert (cfg.rho, cfg.gamma, cfg.omega) == (0.8, 0.5, -0.5)
    assert (cfg.max_step, cfg.it_acc) == (500, 1e-8)


def test_domain_errors_name_the_key():
    with pytest.raises(ParameterError, match=r"alpha ∈ \(0,1\)"):
        cli.parse_config({"alpha": "1.5"})
    for key, value in [("M", "2"), ("N", "0"), ("itacc", "-1"), ("maxstep", "0"),
                       ("T", "0"), ("sweep.axis", "both"), ("sweep.levels", "16,8"),
                       ("output.format", "json"), ("M", "3.5"), ("rho", "abc")]:
        with pytest.raises(ParameterError, match=key.split(".")[0]):
            cli.parse_config({key: value})


def test_unknown_key():
    with pytest.raises(ParameterError, match="unknown configuration key"):
        cli.parse_config({"alhpa": "0.5"})


def test_flag_overrides_file():
    assert cli.parse_config({"N": "8"}, {"N": "16"}).N == 16


@pytest.mark.parametrize("in_file,in_flags", list(itertools.product([False, True], repeat=2)))
@pytest.mark.parametrize("key,field,default,file_val,flag_val", [
    ("alpha", "alpha", 0.5, "0.3", "0.7"),
    ("N", "N", 64, "8", "16"),
    ("itacc", "it_acc", 1e-8, "1e-5", "1e-6"),
    ("sweep.levels", "sweep_levels", (8, 16, 32, 64), "4,8", "16 32"),
    ("output.format", "output_format", "table", "csv", "table"),
])
def test_precedence_exhaustive(key, field, default, file_val, flag_val, in_file, in_flags):
    cfg = cli.parse_config({key: file_val} if in_file else {}, {key: flag_val} if in_flags else {})
    if in_flags:
        expect = cli.KEYS[key][1](key, flag_val)
    elif in_file:
        expect = cli.KEYS[key][1](key, file_val)
    else:
        expect = default
    assert getattr(cfg, field) == expect


def test_config_text():
    text = """
    # comment
    alpha = 0.25
    sweep.axis=space   # trailing comment
    sweep.levels = 16, 32, 64
    """
    cfg = cli.parse_config(cli.parse_config_text(text))
    assert cfg.alpha == 0.25 and cfg.sweep_axis == "space" and cfg.sweep_levels == (16, 32, 64)
    with pytest.raises(ParameterError, match=":2:"):
        cli.parse_config_text("alpha=0.3\nnonsense\n")


def test_config_file_and_flags(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("N=8\nM=16\nalpha=0.3\n")
    args = cli.build_parser().parse_args(["solve", "--config", str(path), "-N", "16"])
    cfg = cli.config_from_args(args)
    assert (cfg.N, cfg.M, cfg.alpha) == (16, 16, 0.3)


@given(st.lists(st.tuples(st.floats(1e-300, 1e3), st.floats(0, 1e6), st.integers(0, 10**6)),
                min_size=1, max_size=6),
       st.floats(-5, 5))
def test_csv_round_trip(values, theta_seed):
    rows = [ConvergenceRow(2 ** (i + 2), xi, None if i == 0 else theta_seed * xi, tm, it)
            for i, (xi, tm, it) in enumerate(values)]
    report = ConvergenceReport("time", 0.4, rows)
    buf = io.StringIO()
    cli.write_csv(report, buf)
    back = cli.read_csv(buf.getvalue(), axis="time", alpha=0.4)
    assert back.rows == report.rows and back.failure is None


def test_csv_layout_and_failure_line():
    report = ConvergenceReport("time", 0.4, [ConvergenceRow(8, 0.1, None, 1.5, 3)],
                               failure="level 16 failed: boom")
    buf = io.StringIO()
    cli.write_csv(report, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "level,xi,theta,time_ms,iterations"
    assert text.splitlines()[1] == "8,0.10000000000000001,,1.5,3"
    assert "\r" not in text
    back = cli.read_csv(text)
    assert back.failure == "level 16 failed: boom" and back.rows == report.rows


def test_table():
    report = ConvergenceReport.from_runs("space", 0.2, [16, 32], [1e-3, 2.5e-4], [1.0, 2.0], [5, 6])
    lines = cli.format_table(report).splitlines()
    assert lines[0].split() == ["alpha", "M", "Xi", "Theta", "time", "(ms)", "iterations"]
    assert len({len(line) for line in lines}) == 1
    assert "2.00000" in lines[2]


def test_converge_small_sweep_and_parallel_ordering():
    cfg = cli.parse_config({"alpha": "0.5", "M": "256", "sweep.levels": "4,8,16"})
    serial = cli.run_converge(cfg)
    assert [r.level for r in serial.rows] == [4, 8, 16]
    assert serial.rows[0].theta is None and serial.rows[2].theta > 1.0
    parallel = cli.run_converge(cli.parse_config({"alpha": "0.5", "M": "256",
                                                  "sweep.levels": "4,8,16", "jobs": "3"}))
    assert [r.xi for r in parallel.rows] == [r.xi for r in serial.rows]
    assert [r.iterations for r in parallel.rows] == [r.iterations for r in serial.rows]


def test_failed_sweep_keeps_completed_rows():
    cfg = cli.parse_config({"M": "16", "sweep.levels": "2,4", "maxstep": "2"})
    report = cli.run_converge(cfg)
    assert report.failure is not None and "level" in report.failure
    assert len(report.rows) < 2


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_main_exit_codes(capsys, tmp_path):
    code, out, _ = run(capsys, "solve", "-M", "16", "-N", "4")
    assert code == 0 and "Xi" in out
    assert run(capsys, "solve", "--alpha", "1.5")[0] == 1
    assert run(capsys, "solve", "--bogus")[0] == 1
    assert run(capsys, "solve", "--problem", "nope")[0] == 1
    code, _, err = run(capsys, "solve", "-M", "16", "-N", "4", "--maxstep", "1")
    assert code == 2 and "not convergent" in err
    assert run(capsys, "converge", "--omega", "5", "--levels", "64")[0] == 2

    out_path = tmp_path / "conv.csv"
    code, _, _ = run(capsys, "converge", "-M", "16", "--levels", "4,8",
                     "--format", "csv", "-o", str(out_path))
    assert code == 0
    report = cli.read_csv(out_path.read_text())
    assert [r.level for r in report.rows] == [4, 8]


def test_solve_csv(capsys):
    code, out, _ = run(capsys, "solve", "-M", "8", "-N", "4", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "x,u,exact" and len(lines) == 8


def test_mlf_command(capsys):
    code, out, _ = run(capsys, "mlf", "--a", "1", "--b", "1", "--g", "1", "--z", "1")
    assert code == 0
    assert float(out.split("=")[1].split()[0]) == pytest.approx(math.e, rel=1e-15)
    code, out, _ = run(capsys, "mlf", "--g", "0", "--b", "1.5", "--z", "2")
    assert float(out.split("=")[1].split()[0]) == pytest.approx(1 / math.gamma(1.5), rel=1e-15)
    code, out, _ = run(capsys, "mlf")
    terms = int(out.split("terms =")[1])
    assert code == 0 and terms < 100
    assert run(capsys, "mlf", "--z", "30")[0] == 2


def test_verify_command(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "skew-symmetry", "--suite", "tridiagonal")
    assert code == 0 and out.count("PASS") == 2
    code, out, _ = run(capsys, "verify", "--suite", "skew-symmetry", "--tamper", "delta")
    assert code == 3 and "FAIL" in out
