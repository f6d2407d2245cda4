import json
import math
import subprocess
import sys

import pytest

from halfeig.cli import main

PROBLEMS = {
    "const_p2.prob": """\
p = 2
domain_length = 1
weight.kind = constant
weight.params = 1
alpha.kind = constant
alpha.params = 0
beta.kind = constant
beta.params = 0
""",
    "jumping.prob": """\
p = 2
domain_length = 1
weight.kind = constant
weight.params = 1
alpha.kind = constant
alpha.params = 2
beta.kind = constant
beta.params = 1
""",
    "rational_r15.prob": """\
p = 2
domain_length = 1
r = 15
weight.kind = constant
weight.params = 1
alpha.kind = constant
alpha.params = 0
beta.kind = constant
beta.params = 0
f.kind = rational
f.params = 1, 0.5, 2
""",
    "oscillatory_pi.prob": """\
p = 2
domain_length = 3.14159265358979312
weight.kind = constant
weight.params = 1
alpha.kind = constant
alpha.params = 0
beta.kind = constant
beta.params = 0
f.kind = oscillatory_C1
f.params = 1
""",
}


@pytest.fixture(scope="module")
def probdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("problems")
    for name, text in PROBLEMS.items():
        (d / name).write_text(text, encoding="utf-8")
    return d


def run(*argv, capsys=None):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_command(probdir, capsys):
    code, out, err = run("spectrum", "--problem", probdir / "const_p2.prob",
                         "--kmax", "3", capsys=capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "k,nu,lambda,residual,zero_count"
    assert len(lines) == 4
    lams = [float(ln.split(",")[2]) for ln in lines[1:]]
    for k, lam in enumerate(lams, start=1):
        assert lam == pytest.approx((k * math.pi) ** 2, rel=1e-9)


def test_spectrum_deterministic(probdir, capsys):
    a = run("spectrum", "--problem", probdir / "const_p2.prob", "--kmax", "2",
            capsys=capsys)
    b = run("spectrum", "--problem", probdir / "const_p2.prob", "--kmax", "2",
            capsys=capsys)
    assert a == b


def test_half_spectrum_command(probdir, capsys):
    code, out, _ = run("half-spectrum", "--problem", probdir / "jumping.prob",
                       "--kmax", "1", capsys=capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 3
    lam_plus = float(lines[1].split(",")[2])
    lam_minus = float(lines[2].split(",")[2])
    assert lam_plus == pytest.approx(math.pi ** 2 - 2.0, rel=1e-9)
    assert lam_minus == pytest.approx(math.pi ** 2 + 1.0, rel=1e-9)


def test_branch_command_writes_file(probdir, tmp_path, capsys):
    out_path = tmp_path / "branch.csv"
    code, out, _ = run("branch", "--problem", probdir / "rational_r15.prob",
                       "--k", "1", "--nu", "+", "--points", "5",
                       "--out", out_path, capsys=capsys)
    assert code == 0
    assert out == ""
    lines = out_path.read_text().strip().splitlines()
    assert lines[0] == "s,lambda,sup_norm,c1_norm,zero_count,residual"
    assert len(lines) == 6


def test_nodal_command(probdir, capsys):
    code, out, _ = run("nodal", "--problem", probdir / "rational_r15.prob",
                       "--k", "1", "--nu", "+", capsys=capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "k,nu,s,lambda,zero_count,residual"
    _, nu, _, lam, zc, _ = lines[1].split(",")
    assert nu == "+" and zc == "0"
    assert abs(float(lam) - 1.0) <= 1e-9


def test_intervals_command(probdir, capsys):
    code, out, _ = run("intervals", "--problem", probdir / "const_p2.prob",
                       "--M", "1", "--k", "2", capsys=capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "k,lambda_lo,lambda_hi"
    _, lo, hi = lines[1].split(",")
    assert float(lo) == pytest.approx(4 * math.pi ** 2 - 1.0, rel=1e-9)
    assert float(hi) == pytest.approx(4 * math.pi ** 2 + 1.0, rel=1e-9)


def test_estimate_command(probdir, capsys):
    code, out, _ = run("estimate-bifurcation", "--problem",
                       probdir / "oscillatory_pi.prob", "--k", "1",
                       "--samples", "4", capsys=capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "s,lambda_estimate,in_interval"
    assert len(lines) >= 2
    for ln in lines[1:]:
        assert -1e-6 <= float(ln.split(",")[1]) <= 2.0 + 1e-6


def test_verify_command(probdir, capsys):
    code, out, _ = run("verify", "--suite", "intervals-overlap", capsys=capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] is True
    assert doc["seed"] == 42


def test_verify_seed_flag(probdir, capsys):
    code, out, _ = run("verify", "--suite", "sturm", "--seed", "7",
                       capsys=capsys)
    assert code == 0
    assert json.loads(out)["seed"] == 7


def test_usage_errors(probdir, capsys):
    cases = [
        ("spectrum", "--problem", probdir / "const_p2.prob", "--kmax", "0"),
        ("spectrum", "--problem", probdir / "nope.prob", "--kmax", "2"),
        ("spectrum", "--problem", probdir / "const_p2.prob", "--kmax", "2",
         "--bogus"),
        ("spectrum", "--problem", probdir / "jumping.prob", "--kmax", "2"),
        ("verify", "--suite", "made-up"),
        ("intervals", "--problem", probdir / "const_p2.prob", "--M", "1"),
        ("branch", "--problem", probdir / "rational_r15.prob", "--k", "1",
         "--nu", "x"),
        ("nodal", "--problem", probdir / "rational_r15.prob", "--k", "3",
         "--kmax", "2"),
    ]
    for argv in cases:
        code, _, err = run(*argv, capsys=capsys)
        assert code == 2, argv


def test_no_command_is_usage_error(capsys):
    code, _, _ = run(capsys=capsys)
    assert code == 2


def test_numerical_failure_exit_code(probdir, tmp_path, capsys):
    # r far below the crossing window: the branch never meets lambda = 1
    text = PROBLEMS["rational_r15.prob"].replace("r = 15", "r = 3")
    path = tmp_path / "low_r.prob"
    path.write_text(text, encoding="utf-8")
    code, out, err = run("nodal", "--problem", path, "--k", "1", "--nu", "+",
                         capsys=capsys)
    assert code == 3
    assert "no_crossing" in err


def test_console_script_entry_point(probdir):
    proc = subprocess.run(
        [sys.executable, "-m", "halfeig.cli", "verify", "--suite",
         "intervals-overlap"],
        capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["ok"] is True
