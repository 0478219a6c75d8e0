"""Conic backend: svec/smat, small SDPs with known closed-form solutions."""

import numpy as np
import pytest

from sipsolve.conic import (ConicError, ConicProgram, PsdBlock, SolveOptions,
                            default_backend, smat, svec)


def test_svec_smat_round_trip():
    rng = np.random.default_rng(0)
    for n in (1, 2, 3, 5):
        A = rng.standard_normal((n, n))
        M = A + A.T
        assert np.allclose(smat(svec(M), n), M)
        # isometry: <svec(M), svec(N)> = <M, N>
        B = rng.standard_normal((n, n))
        N = B + B.T
        assert np.dot(svec(M), svec(N)) == pytest.approx(np.sum(M * N))


def _solve(prog, tol=1e-10):
    return default_backend().solve(prog) if not hasattr(prog, "nope") else None


def test_min_diagonal_entry():
    # min y s.t. [[y, 1], [1, y]] >= 0  ->  y = 1
    blk = PsdBlock(2)
    blk.add(0, 0, 0, 1.0)
    blk.add(0, 1, 1, 1.0)
    blk.add(-1, 0, 1, 1.0)
    prog = ConicProgram(1, np.array([1.0]), blocks=[blk])
    sol = default_backend().solve(prog)
    assert sol.ok
    assert sol.objective == pytest.approx(1.0, abs=1e-7)
    assert sol.y[0] == pytest.approx(1.0, abs=1e-7)


def test_equality_and_psd():
    # min y1 + y2 s.t. y1 + y2 >= 2 (as 1x1 psd), y1 - y2 = 0  ->  (1, 1)
    blk = PsdBlock(1)
    blk.add(0, 0, 0, 1.0)
    blk.add(1, 0, 0, 1.0)
    blk.add(-1, 0, 0, -2.0)
    prog = ConicProgram(2, np.array([1.0, 1.0]), blocks=[blk])
    prog.add_equality({0: 1.0, 1: -1.0}, 0.0)
    sol = default_backend().solve(prog)
    assert sol.ok
    assert np.allclose(sol.y, [1.0, 1.0], atol=1e-7)


def test_infeasible_detected():
    # y >= 1 and y <= 0 simultaneously
    b1 = PsdBlock(1)
    b1.add(0, 0, 0, 1.0)
    b1.add(-1, 0, 0, -1.0)
    b2 = PsdBlock(1)
    b2.add(0, 0, 0, -1.0)
    prog = ConicProgram(1, np.array([1.0]), blocks=[b1, b2])
    sol = default_backend().solve(prog)
    assert sol.status == "infeasible"


def test_unbounded_detected():
    blk = PsdBlock(1)
    blk.add(0, 0, 0, 1.0)
    prog = ConicProgram(1, np.array([-1.0]), blocks=[blk])
    sol = default_backend().solve(prog)
    assert sol.status == "unbounded"


def test_dual_matrices_psd_and_gap():
    blk = PsdBlock(2)
    blk.add(0, 0, 0, 1.0)
    blk.add(0, 1, 1, 1.0)
    blk.add(-1, 0, 1, 1.0)
    prog = ConicProgram(1, np.array([1.0]), blocks=[blk])
    sol = default_backend().solve(prog)
    assert sol.ok
    assert sol.gap <= 1e-6
    for Z in sol.dual_matrices:
        assert np.linalg.eigvalsh(Z).min() >= -1e-7


def test_validate_rejects_bad_program():
    blk = PsdBlock(1)
    blk.add(3, 0, 0, 1.0)
    prog = ConicProgram(1, np.array([0.0]), blocks=[blk])
    with pytest.raises(ConicError):
        prog.validate()
    with pytest.raises(ConicError):
        ConicProgram(2, np.array([1.0]))
