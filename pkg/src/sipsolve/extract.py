"""Flat-truncation certification and minimizer extraction from moment matrices.

Flatness (equal numerical rank of two nested moment matrix truncations)
certifies that the relaxation is exact and the optimal moment vector comes
from an atomic measure.  The extraction walks the standard route: rank-
revealing factorization, column echelon form to pick a monomial basis,
multiplication matrices, and simultaneous diagonalization through the real
Schur form of a random convex combination.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .moment import TruncatedMomentSequence, moment_matrix
from .poly import SemialgebraicSet, grlex_key, monomial_exponents

RANK_TOL_RATIO = 1e-6
# Flatness tests use a looser ratio matched to interior-point accuracy: the
# solver's central-path solution carries O(1e-5) noise in the trailing
# spectrum, so demanding 1e-6 separation would reject genuinely flat output.
FTC_RANK_TOL = 1e-3
PIVOT_TOL = 1e-8
FEAS_TOL = 1e-5
MIN_WEIGHT = 1e-8


@dataclass
class RankProfile:
    """Numerical ranks of M_t(y) for a range of truncations, with audit data."""

    ranks: dict[int, int] = field(default_factory=dict)
    singular_values: dict[int, list[float]] = field(default_factory=dict)


@dataclass
class AtomSet:
    points: list[np.ndarray]
    weights: list[float]


def numerical_rank(M: np.ndarray, tol_ratio: float = RANK_TOL_RATIO,
                   return_singular: bool = False):
    """Count singular values above ``tol_ratio`` times the largest one."""
    if M.size == 0:
        return (0, []) if return_singular else 0
    sv = np.linalg.svd(M, compute_uv=False)
    thresh = tol_ratio * max(sv[0], 1e-12)
    r = int(np.sum(sv > thresh))
    if return_singular:
        return r, sv.tolist()
    return r


def psd_rank(M: np.ndarray, tol_ratio: float) -> int:
    """Rank counting positive eigenvalues only.

    Moment matrices are PSD up to solver noise; counting magnitudes would let
    a spurious negative eigenvalue near the threshold disagree with the
    factorization used for extraction, which keeps positive eigenpairs.
    """
    if M.size == 0:
        return 0
    w = np.linalg.eigvalsh(M)
    return int(np.sum(w > tol_ratio * max(abs(w[-1]), 1e-12)))


def rank_profile(y: TruncatedMomentSequence, tol_ratio: float = RANK_TOL_RATIO) -> RankProfile:
    prof = RankProfile()
    for t in range(y.order + 1):
        r, sv = numerical_rank(moment_matrix(y, t), tol_ratio, return_singular=True)
        prof.ranks[t] = r
        prof.singular_values[t] = sv
    return prof


def check_flat_truncation(y: TruncatedMomentSequence, d: int, k: int,
                          min_t: int | None = None,
                          ranks: dict[int, int] | None = None,
                          tol_ratio: float = RANK_TOL_RATIO) -> int | None:
    """Smallest t in [min_t, k] with rank M_{t-d} = rank M_t, or None."""
    if min_t is None:
        min_t = d
    if ranks is None:
        ranks = {t: psd_rank(moment_matrix(y, t), tol_ratio)
                 for t in range(y.order + 1)}
    for t in range(max(min_t, d), k + 1):
        if ranks.get(t - d) == ranks.get(t):
            return t
    return None


class ExtractionFailure(Exception):
    """Echelon/Schur breakdown; caller should raise the relaxation order."""


def _column_echelon(W: np.ndarray, max_pivot_degree: int, basis) -> tuple[list[int], np.ndarray]:
    """Reduce the r x s matrix W to reduced row echelon form, scanning columns
    in graded lex order.  Returns pivot column indices and the reduced matrix.
    """
    U = W.copy()
    r, s = U.shape
    scale = max(np.max(np.abs(U)), 1.0)
    pivots: list[int] = []
    row = 0
    for col in range(s):
        if row >= r:
            break
        i = row + int(np.argmax(np.abs(U[row:, col])))
        if abs(U[i, col]) <= PIVOT_TOL * scale:
            continue
        if sum(basis[col]) > max_pivot_degree:
            raise ExtractionFailure("pivot escaped the flat truncation degree")
        U[[row, i]] = U[[i, row]]
        U[row] /= U[row, col]
        for j in range(r):
            if j != row:
                U[j] -= U[j, col] * U[row]
        pivots.append(col)
        row += 1
    if row < r:
        raise ExtractionFailure("echelon rank below factorization rank")
    return pivots, U


def extract_minimizers(y: TruncatedMomentSequence, t: int, d: int,
                       constraints: SemialgebraicSet | None = None,
                       seed: int = 0,
                       tol_ratio: float = RANK_TOL_RATIO) -> AtomSet | None:
    """Recover the atoms of a flat moment vector truncated at order ``t``.

    Returns None when the echelon or Schur step breaks down (certification is
    then revoked and the caller escalates the order).  Atoms violating the
    constraint set beyond the feasibility tolerance are rejected.
    """
    n = y.n
    M = moment_matrix(y, t)
    w, V = np.linalg.eigh(M)
    order = np.argsort(w)[::-1]
    w, V = w[order], V[:, order]
    thresh = tol_ratio * max(abs(w[0]), 1e-12)
    r = int(np.sum(w > thresh))
    if r == 0:
        return None
    W = V[:, :r] * np.sqrt(w[:r])          # M ~ W W^T
    basis = monomial_exponents(n, t)
    try:
        pivots, U = _column_echelon(W.T, t - d, basis)
    except ExtractionFailure:
        return None
    pivot_exps = [basis[p] for p in pivots]
    col_of = {e: i for i, e in enumerate(basis)}
    pivot_rows = {}
    # rows of U correspond to pivots in discovery (graded lex) order
    for rrow, p in enumerate(pivots):
        pivot_rows[p] = rrow
    Ns = []
    for i in range(n):
        N = np.empty((r, r))
        for l, be in enumerate(pivot_exps):
            shifted = list(be)
            shifted[i] += 1
            c = col_of.get(tuple(shifted))
            if c is None:
                return None
            N[:, l] = U[:, c]
        Ns.append(N)
    rng = np.random.default_rng(seed)
    lam = rng.random(n)
    lam /= lam.sum()
    N = sum(l * Ni for l, Ni in zip(lam, Ns))
    T, Q = scipy.linalg.schur(N, output="real")
    sub = np.abs(np.diag(T, -1)) if r > 1 else np.array([0.0])
    if sub.size and np.max(sub) > 1e-6 * max(1.0, np.max(np.abs(T))):
        return None  # complex-conjugate block: atoms are not real
    pts = []
    for j in range(r):
        q = Q[:, j]
        pts.append(np.array([q @ Ni @ q for Ni in Ns]))
    # weights from least-squares moment matching over degree <= 2(t-d)
    fit_exps = monomial_exponents(n, 2 * (t - d))
    idx = y.index()
    A = np.array([[float(np.prod(np.asarray(v, dtype=float) ** np.array(e)))
                   for v in pts] for e in fit_exps])
    b = np.array([y.values[idx[e]] for e in fit_exps])
    wts, *_ = np.linalg.lstsq(A, b, rcond=None)
    atoms, weights = [], []
    for v, wt in zip(pts, wts):
        if wt < MIN_WEIGHT:
            continue
        if constraints is not None:
            scale = 1.0 + float(np.max(np.abs(v)))
            if constraints.violation(v) > FEAS_TOL * scale:
                continue
        atoms.append(v)
        weights.append(float(wt))
    if not atoms:
        return None
    return AtomSet(atoms, weights)
