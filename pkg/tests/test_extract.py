"""Flatness check and atom extraction from truncated moment sequences."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sipsolve.extract import (check_flat_truncation, extract_minimizers,
                              numerical_rank, psd_rank, rank_profile)
from sipsolve.moment import TruncatedMomentSequence
from sipsolve.poly import SemialgebraicSet, VariableSpace, parse_polynomial


def test_numerical_rank_thresholding():
    M = np.diag([1.0, 1e-3, 1e-9, 0.0])
    assert numerical_rank(M, tol_ratio=1e-6) == 2
    assert numerical_rank(M, tol_ratio=1e-12) == 3
    r, sv = numerical_rank(M, tol_ratio=1e-6, return_singular=True)
    assert r == 2 and sv[0] == pytest.approx(1.0)


def test_psd_rank_ignores_negative_noise():
    M = np.diag([1.0, 2e-4, -2e-4])
    assert psd_rank(M, tol_ratio=1e-3) == 1
    assert numerical_rank(M, tol_ratio=1e-6) == 3


def _atoms_roundtrip(pts, weights, order, d=1):
    y = TruncatedMomentSequence.from_atoms(pts, weights, order)
    t = check_flat_truncation(y, d, order)
    assert t is not None, "atomic measures must be flat"
    atoms = extract_minimizers(y, t, d)
    assert atoms is not None
    assert len(atoms.points) == len(pts)
    got = sorted(tuple(np.round(p, 8)) for p in atoms.points)
    want = sorted(tuple(np.round(np.asarray(p, float), 8)) for p in pts)
    for g, w in zip(got, want):
        assert np.allclose(g, w, atol=1e-6)
    # weights recovered up to permutation
    assert sum(atoms.weights) == pytest.approx(sum(weights), abs=1e-6)


def test_single_atom():
    _atoms_roundtrip([[0.7, -0.3]], [1.0], order=2)


def test_two_atoms():
    _atoms_roundtrip([[1.0, 1.0], [-1.0, 0.5]], [0.4, 0.6], order=3)


def test_four_atoms_three_vars():
    pts = [[0.1, 0.2, 0.3], [-0.5, 0.4, 0.0],
           [0.9, -0.9, 0.2], [-0.2, -0.1, -0.7]]
    _atoms_roundtrip(pts, [0.25, 0.25, 0.3, 0.2], order=3)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=1, max_value=4), st.integers(min_value=0, max_value=10**6))
def test_random_atom_round_trip(r, seed):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.0, 1.0, size=(r, 2))
    # keep atoms separated so the measure is genuinely r-atomic
    for _ in range(50):
        d = min((np.max(np.abs(pts[i] - pts[j]))
                 for i in range(r) for j in range(i + 1, r)), default=1.0)
        if d > 0.1:
            break
        pts = rng.uniform(-1.0, 1.0, size=(r, 2))
    w = rng.uniform(0.2, 1.0, size=r)
    w /= w.sum()
    _atoms_roundtrip(pts.tolist(), w.tolist(), order=3)


def test_flat_truncation_rejects_generic_measure():
    # a 50-atom generic measure has strictly growing moment-matrix ranks
    rng = np.random.default_rng(0)
    pts = rng.uniform(-1, 1, size=(50, 2))
    w = np.full(50, 1.0 / 50)
    y = TruncatedMomentSequence.from_atoms(pts, w, 3)
    assert check_flat_truncation(y, 1, 3) is None


def test_extraction_respects_constraints():
    X = VariableSpace("x", 2)
    S = SemialgebraicSet(X, inequalities=[parse_polynomial("x1 - 10", [X])])
    y = TruncatedMomentSequence.from_atoms([[0.5, 0.5]], [1.0], 2)
    t = check_flat_truncation(y, 1, 2)
    atoms = extract_minimizers(y, t, 1, constraints=S)
    assert atoms is None or not atoms.points


def test_rank_profile_audit():
    y = TruncatedMomentSequence.from_atoms([[1.0, 0.0], [0.0, 1.0]],
                                           [0.5, 0.5], 2)
    prof = rank_profile(y)
    assert prof.ranks[0] == 1
    assert prof.ranks[1] == 2
    assert prof.ranks[2] == 2
    assert all(len(v) > 0 for v in prof.singular_values.values())
