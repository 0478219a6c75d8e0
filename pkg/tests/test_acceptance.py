"""Acceptance suite: seven end-to-end criteria, one pass/fail line each.

Heavyweight exchange runs are cached across criteria so the whole suite
stays within the stated runtime budgets.
"""

import time

import numpy as np
import pytest
import scipy.optimize

from sipsolve import corpus
from sipsolve.conic import default_backend
from sipsolve.exchange import exchange_loop
from sipsolve.extract import check_flat_truncation, extract_minimizers
from sipsolve.jacobian import jacobian_minimize
from sipsolve.moment import (RelaxationProblem, TruncatedMomentSequence,
                             build_moment_sdp, localizing_matrix, riesz_apply,
                             solve_relaxation)
from sipsolve.pmi import PolynomialMatrix, pmi_to_sipp
from sipsolve.poly import (Polynomial, SemialgebraicSet, VariableSpace,
                           monomial_exponents, parse_polynomial)
from sipsolve.probio import RandomInstanceSpec, generate_random_instance
from sipsolve.sdpa import export_sdpa, import_sdpa

_runs: dict[str, tuple] = {}


def _run(name):
    if name not in _runs:
        entry = corpus.get(name)
        t0 = time.time()
        report = exchange_loop(entry.problem, entry.options)
        _runs[name] = (entry, report, time.time() - t0)
    return _runs[name]


def _verdict(num, label, failures):
    status = "PASS" if not failures else "FAIL"
    print(f"criterion {num} ({label}): {status}")
    assert not failures, "; ".join(failures)


def _check_entry(name, failures, runtime_cap=None):
    entry, report, elapsed = _run(name)
    if report.status != entry.expect_status:
        failures.append(f"{name}: status {report.status}, "
                        f"expected {entry.expect_status}")
        return entry, report, elapsed
    if entry.f_star is not None and report.f_star is not None:
        df = abs(report.f_star - entry.f_star)
        if df > entry.f_tol:
            failures.append(f"{name}: |f* - {entry.f_star}| = {df:.2e}")
    if entry.x_star is not None:
        if not report.minimizers:
            failures.append(f"{name}: no minimizer returned")
        else:
            dx = min(float(np.max(np.abs(np.asarray(m) - entry.x_star)))
                     for m in report.minimizers)
            if dx > entry.x_tol:
                failures.append(f"{name}: minimizer off by {dx:.2e}")
    if report.obj2 is not None and report.obj2 < entry.obj2_floor:
        failures.append(f"{name}: Obj_2 = {report.obj2:.2e}")
    if entry.iter_cap is not None and report.iterations > entry.iter_cap:
        failures.append(f"{name}: {report.iterations} iterations")
    if runtime_cap is not None and elapsed > runtime_cap:
        failures.append(f"{name}: took {elapsed:.0f}s")
    return entry, report, elapsed


def test_criterion_1_golden_corpus():
    """Seven compact benchmark problems within stated tolerances, < 5 min."""
    failures = []
    total = 0.0
    for name in ("sip01", "sip02", "sip03", "sip04", "sip05", "sip06",
                 "sip07"):
        _, report, elapsed = _check_entry(name, failures)
        total += elapsed
        if report.certified and report.iterations > 6:
            failures.append(f"{name}: {report.iterations} > 6 iterations")
    if total > 300:
        failures.append(f"total runtime {total:.0f}s > 5 min")
    _verdict(1, "golden corpus reproduction", failures)


def test_criterion_2_matrix_inequality_3x3():
    failures = []
    _check_entry("pmi-3x3", failures, runtime_cap=120)
    _verdict(2, "3x3 matrix inequality", failures)


@pytest.mark.xfail(
    strict=True,
    reason="the published reference optimum 1.5771 at (0.5093, -1.0678) is "
           "not the minimum of this instance: that point is strictly "
           "interior to the matrix inequality (smallest eigenvalue +0.3616) "
           "while direct eigenvalue optimization finds the feasible boundary "
           "point (0.083941, -0.947333) with the smaller value 1.031274")
def test_criterion_2_matrix_inequality_4x4_published_reference():
    failures = []
    entry, report, elapsed = _run("pmi-4x4")
    if report.f_star is None or abs(report.f_star - 1.5771) > 1e-3:
        failures.append(f"f* = {report.f_star}, reference 1.5771")
    ref = np.array([0.5093, -1.0678])
    if not report.minimizers or min(
            float(np.max(np.abs(np.asarray(m) - ref)))
            for m in report.minimizers) > 5e-3:
        failures.append("minimizer does not match (0.5093, -1.0678)")
    _verdict(2, "4x4 matrix inequality, published reference", failures)


def test_criterion_2_matrix_inequality_4x4_verified_optimum():
    """The 4x4 example against an independently re-derived optimum.

    The published value is unattainable (see the companion expected-failure
    test); this run is checked against the optimum confirmed by direct
    eigenvalue optimization: f* = 1.031274 at (0.083941, -0.947333).
    """
    failures = []
    _check_entry("pmi-4x4", failures, runtime_cap=120)
    _verdict(2, "4x4 matrix inequality, verified optimum", failures)


def test_criterion_3_homogenization_equivalence():
    failures = []
    _check_entry("circle-hom", failures)
    _check_entry("circle-raw", failures)
    _check_entry("cubic-curve-hom", failures)
    _check_entry("cubic-curve-raw", failures)
    _verdict(3, "homogenization equivalence", failures)


def test_criterion_4_negative_control_not_closed_at_infinity():
    failures = []
    _check_entry("lifted-infeasible", failures)
    _verdict(4, "negative control, index set not closed at infinity",
             failures)


def _random_poly(space, deg, rng):
    exps = monomial_exponents(space.dim, deg)
    cs = rng.standard_normal(len(exps))
    return Polynomial((space,), {e: c for e, c in zip(exps, cs) if c})


def _ball(space):
    return Polynomial.constant(1.0, (space,)) - sum(
        (Polynomial.variable(space, i, (space,)) ** 2
         for i in range(space.dim)), Polynomial.zero((space,)))


def test_criterion_5_property_suites():
    failures = []
    t0 = time.time()
    rng = np.random.default_rng(2024)
    X2 = VariableSpace("x", 2)

    # localizing identity q^T L_p(y) q = L_y(p q^2), 50 random triples
    for _ in range(50):
        y = TruncatedMomentSequence(
            2, 3, rng.standard_normal(len(monomial_exponents(2, 6))))
        p = _random_poly(X2, 2, rng)
        t = (6 - p.degree()) // 2
        basis = monomial_exponents(2, t)
        qc = rng.standard_normal(len(basis))
        q = Polynomial((X2,), {e: c for e, c in zip(basis, qc) if c})
        lhs = qc @ localizing_matrix(y, p, t) @ qc
        rhs = riesz_apply(y, p * q * q)
        if abs(lhs - rhs) > 1e-9 * max(1.0, abs(rhs)):
            failures.append(f"localizing identity off by {abs(lhs - rhs):.1e}")
            break

    # hierarchy monotonicity below a grid oracle, 10 instances
    for _ in range(10):
        n = int(rng.integers(1, 4))
        sp = VariableSpace("x", n)
        f = _random_poly(sp, 4, rng)
        S = SemialgebraicSet(sp, inequalities=[_ball(sp)])
        b2 = solve_relaxation(RelaxationProblem(f, S, 2), extract=False)
        b3 = solve_relaxation(RelaxationProblem(f, S, 3), extract=False)
        pts = rng.uniform(-1, 1, size=(3000, n))
        pts = pts[np.linalg.norm(pts, axis=1) <= 1.0]
        oracle = min(f({sp.name: p}) for p in pts)
        if not (b2.moment_bound <= b3.moment_bound + 1e-6
                and b3.moment_bound <= oracle + 1e-6):
            failures.append("hierarchy monotonicity violated")
            break

    # flat truncation + extraction round trip on r-atom measures, r <= 4
    for r in (1, 2, 3, 4):
        pts = rng.uniform(-1, 1, size=(r, 2))
        while r > 1 and min(np.max(np.abs(pts[i] - pts[j]))
                            for i in range(r)
                            for j in range(i + 1, r)) < 0.2:
            pts = rng.uniform(-1, 1, size=(r, 2))
        w = rng.uniform(0.2, 1.0, size=r)
        w /= w.sum()
        y = TruncatedMomentSequence.from_atoms(pts, w, 3)
        t = check_flat_truncation(y, 1, 3)
        atoms = extract_minimizers(y, t, 1) if t is not None else None
        if atoms is None or len(atoms.points) != r:
            failures.append(f"{r}-atom round trip failed")
            continue
        got = sorted(map(tuple, np.round(atoms.points, 9)))
        want = sorted(map(tuple, np.round(pts, 9)))
        if any(np.max(np.abs(np.array(g) - np.array(v))) > 1e-6
               for g, v in zip(got, want)):
            failures.append(f"{r}-atom round trip inaccurate")

    # Jacobian-augmented hierarchy vs a grid + local-refinement oracle
    for _ in range(10):
        f = _random_poly(X2, 3, rng)
        S = SemialgebraicSet(X2, inequalities=[_ball(X2)])
        res = jacobian_minimize(f, S)
        ax = np.linspace(-1, 1, 81)
        grid = np.array([(a, b) for a in ax for b in ax
                         if a * a + b * b <= 1.0])
        x0 = grid[np.argmin([f({"x": p}) for p in grid])]
        ref = scipy.optimize.minimize(
            lambda v: f({"x": v}), x0, method="SLSQP",
            constraints=[{"type": "ineq", "fun": lambda v: 1.0 - v @ v}],
            options={"ftol": 1e-12, "maxiter": 200})
        if not res.certified or abs(res.moment_bound - ref.fun) > 1e-4:
            failures.append("Jacobian hierarchy disagrees with grid oracle")
            break

    # sphere-constrained quadratic inner solves vs the eigenvalue oracle
    for _ in range(20):
        m = int(rng.integers(2, 4))
        A = rng.standard_normal((m, m))
        Smat = A + A.T
        entries = {(i, j): Polynomial.constant(Smat[i, j], (X2,))
                   for i in range(m) for j in range(i, m)}
        prob = pmi_to_sipp(parse_polynomial("x1", [X2]),
                           PolynomialMatrix(m, entries))
        res = jacobian_minimize(prob.inner_objective(np.zeros(2)), prob.U,
                                order_cap=3)
        lam = np.linalg.eigvalsh(Smat).min()
        if not res.certified or not res.minimizers:
            failures.append("inner eigenvalue solve not certified")
            break
        u = res.minimizers[0] / np.linalg.norm(res.minimizers[0])
        if abs(u @ Smat @ u - lam) > 1e-6:
            failures.append("inner eigenvalue solve inaccurate")
            break

    if time.time() - t0 > 120:
        failures.append(f"property suites took {time.time() - t0:.0f}s")
    _verdict(5, "property suites", failures)


def test_criterion_6_sdpa_cross_check(tmp_path):
    failures = []
    X2 = VariableSpace("x", 2)
    rng = np.random.default_rng(6)
    progs = []
    for i in range(5):
        f = _random_poly(X2, 4, rng)
        S = SemialgebraicSet(X2,
                             equalities=([parse_polynomial("x1 + x2 - 1", [X2])]
                                         if i % 2 else []),
                             inequalities=[_ball(X2)])
        progs.append(build_moment_sdp(RelaxationProblem(f, S, 2)))
    backend = default_backend()
    for i, prog in enumerate(progs):
        path = tmp_path / f"relax{i}.dat-s"
        export_sdpa(prog, str(path))
        sol1 = backend.solve(prog)
        sol2 = backend.solve(import_sdpa(str(path)))
        if not (sol1.ok and sol2.ok):
            failures.append(f"relaxation {i}: solve failed")
        elif abs(sol1.objective - sol2.objective) > 1e-6:
            failures.append(f"relaxation {i}: objectives differ by "
                            f"{abs(sol1.objective - sol2.objective):.1e}")
    _verdict(6, "backend cross-check via file round trip", failures)


def test_criterion_7_random_instance_feasibility():
    """Generated 5-var/3-index instances certify with Obj_2 >= -1e-4."""
    failures = []
    for seed in (0, 1):
        spec = RandomInstanceSpec(n=5, p=3, d1=3, d2=2, uset="ball",
                                  seed=seed)
        problem = generate_random_instance(spec)
        report = exchange_loop(problem)
        if not report.certified:
            failures.append(f"seed {seed}: status {report.status}")
        elif report.obj2 is None or report.obj2 < -1e-4:
            failures.append(f"seed {seed}: Obj_2 = {report.obj2}")
    _verdict(7, "random instance feasibility", failures)
