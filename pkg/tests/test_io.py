"""Problem files, random instance generation, reports, CLI plumbing."""

import json

import numpy as np
import pytest

from sipsolve import cli, corpus
from sipsolve.exchange import ExchangeOptions
from sipsolve.probio import (ProblemFileError, RandomInstanceSpec,
                             generate_random_instance, parse_pmi,
                             parse_problem, render_problem, report_to_dict,
                             run_pipeline)

SIP_FILE = """\
[problem]
name = taylor-sine
x = x 2
u = u 1
f = 1/3 x1^2 + 1/2 x1 + x2^2 - x2
g = - x1^2 - 2 x1 x2 u1^2 + u1 - 1/6 u1^3

[X]
ineq = 10000 - x1^2
ineq = 10000 - x2^2

[U]
ineq = u1
ineq = 2 - u1

[options]
u0 = 1.0
k_max = 6
"""

PMI_FILE = """\
[pmi]
name = diag
x = x 1
f = x1
size = 2
g(1,1) = 1 - x1
g(2,2) = 1 + x1

[options]
eps = 1e-6
"""


def test_parse_sip_file():
    prob, opts, hom = parse_problem(SIP_FILE)
    assert prob.name == "taylor-sine"
    assert prob.g.degree_in(prob.u_space) == 3
    assert len(prob.X.inequalities) == 2
    assert len(prob.U.inequalities) == 2
    assert opts.k_max == 6
    assert np.allclose(opts.u0, [1.0])
    assert not hom


def test_parse_rejects_unknown_key():
    with pytest.raises(ProblemFileError, match="unknown section"):
        parse_problem(SIP_FILE + "\n[bogus]\n")
    with pytest.raises(ProblemFileError, match="unknown option"):
        parse_problem(SIP_FILE + "verbosity = 3\n")
    with pytest.raises(ProblemFileError, match="line 2"):
        parse_problem("[problem]\nwhat = 1\n")


def test_parse_reports_line_numbers():
    bad = SIP_FILE.replace("g = - x1^2", "g = - x1^^2")
    with pytest.raises(ProblemFileError) as exc:
        parse_problem(bad)
    assert "line 6" in str(exc.value)


def test_render_parse_round_trip():
    for name in ("sip01", "sip04", "circle-hom"):
        entry = corpus.get(name)
        text = render_problem(entry.problem, entry.options)
        back, opts, _ = parse_problem(text)
        assert back.f == entry.problem.f
        assert back.g == entry.problem.g
        assert back.X.members() == entry.problem.X.members()
        assert back.U.members() == entry.problem.U.members()
        assert back.u_compact == entry.problem.u_compact


def test_parse_pmi_file():
    f, G, X, opts, hom = parse_pmi(PMI_FILE)
    assert G.size == 2
    assert opts.eps == 1e-6
    assert G.value_at({"x": [0.5]})[0, 0] == pytest.approx(0.5)


def test_pmi_file_rejects_bad_index():
    with pytest.raises(ProblemFileError, match="index"):
        parse_pmi(PMI_FILE.replace("g(2,2)", "g(3,2)"))


def test_generator_deterministic_and_psd():
    spec = RandomInstanceSpec(n=2, p=2, d1=1, d2=1, uset="box", seed=5)
    a = generate_random_instance(spec)
    b = generate_random_instance(spec)
    assert a.f == b.f and a.g == b.g
    assert a.g({"x": [0, 0], "u": [0, 0]}) > 0


def test_generator_gram_matrix_psd_many_seeds():
    for seed in range(100):
        spec = RandomInstanceSpec(n=1, p=1, d1=1, d2=1, uset="ball", seed=seed)
        _, tau, M, _ = generate_random_instance(spec, return_parts=True)
        assert 1.0 <= tau <= 10.0
        assert np.linalg.eigvalsh(M).min() >= -1e-10


def test_generator_coupling_matches_quadratic_form():
    spec = RandomInstanceSpec(n=2, p=1, d1=1, d2=2, uset="ball", seed=2)
    prob, tau, M, z = generate_random_instance(spec, return_parts=True)
    rng = np.random.default_rng(0)
    for _ in range(20):
        pt = {"x": rng.uniform(-1, 1, size=2), "u": rng.uniform(-1, 1, size=1)}
        zv = np.array([zi(pt) for zi in z])
        assert prob.g(pt) == pytest.approx(tau - zv @ M @ zv, rel=1e-10,
                                           abs=1e-10)


def test_generator_uset_variants():
    for uset in ("ball", "box", "simplex"):
        prob = generate_random_instance(
            RandomInstanceSpec(n=1, p=2, d1=1, d2=1, uset=uset, seed=1))
        assert prob.U.inequalities
    with pytest.raises(ValueError):
        RandomInstanceSpec(n=1, p=1, d1=1, d2=1, uset="annulus")


def test_run_pipeline_report_and_exit_code(tmp_path):
    prob, opts, _ = parse_problem(SIP_FILE)
    report_path = tmp_path / "out.json"
    report, code = run_pipeline(prob, opts, report_path=str(report_path))
    assert code == 0
    assert report.certified
    data = json.loads(report_path.read_text())
    assert data["schema"] == "sipsolve-report-v1"
    assert data["status"] == "certified"
    assert data["obj2"] >= -opts.eps
    assert data["trace"]
    assert data["trace"][-1]["master_rank_profile"]


def test_run_pipeline_infeasible_exit_code():
    text = """\
[problem]
x = x 1
u = u 1
f = x1
g = 1 + u1

[X]
ineq = x1 - 1
ineq = - x1

[U]
ineq = u1
ineq = 1 - u1
"""
    prob, opts, _ = parse_problem(text)
    opts.u0 = np.array([0.5])
    report, code = run_pipeline(prob, opts)
    assert report.status == "master_infeasible"
    assert code == 1


def test_report_dict_serializable():
    entry = corpus.get("sip05")
    report, _ = run_pipeline(entry.problem, entry.options)
    blob = json.dumps(report_to_dict(report))
    assert "certified" in blob


def test_cli_gen_and_solve(tmp_path, capsys):
    out = tmp_path / "inst.sip"
    assert cli.main(["gen", "--n", "2", "--p", "1", "--d1", "1", "--d2", "1",
                     "--seed", "3", "-o", str(out)]) == 0
    report = tmp_path / "r.json"
    code = cli.main(["solve", str(out), "--report", str(report)])
    captured = capsys.readouterr()
    assert "status" in captured.out
    assert code in (0, 2, 3)
    assert json.loads(report.read_text())["schema"] == "sipsolve-report-v1"


PMI_FILE_2D = """\
[pmi]
name = disk
x = x 2
f = x1 + x2
size = 2
g(1,1) = 1 - x1^2 - x2^2
g(2,2) = 1

[options]
eps = 1e-6
"""


def test_cli_pmi_with_grid(tmp_path, capsys):
    f = tmp_path / "d.pmi"
    f.write_text(PMI_FILE_2D)
    grid = tmp_path / "grid.csv"
    code = cli.main(["pmi", str(f), "--grid", str(grid), "--grid-res", "11",
                     "--grid-lo", "-2", "--grid-hi", "2"])
    assert code == 0
    lines = grid.read_text().splitlines()
    assert lines[0] == "x1,x2,feasible"
    assert len(lines) == 1 + 11 * 11


def test_cli_env_tolerance_override(tmp_path, monkeypatch):
    prob, opts, _ = parse_problem(SIP_FILE)
    monkeypatch.setenv("SIPSOLVE_SOLVER_TOL", "1e-7")
    opts2 = cli._apply_env(ExchangeOptions())
    assert opts2.solver.tol == 1e-7
    monkeypatch.setenv("SIPSOLVE_SOLVER_TOL", "zzz")
    with pytest.raises(SystemExit):
        cli._apply_env(ExchangeOptions())


def test_cli_solve_bad_file(tmp_path, capsys):
    f = tmp_path / "bad.sip"
    f.write_text("[problem]\nx = x 2\n")
    assert cli.main(["solve", str(f)]) == 4
    assert "missing key" in capsys.readouterr().err
