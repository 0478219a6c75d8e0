"""Moment-side semidefinite relaxation of finitely constrained polynomial problems.

For a problem ``min f`` over ``{h_j = 0, g_i >= 0}`` and order ``k``, this
module assembles the dual moment SDP in the truncated moment sequence y:
minimize the Riesz pairing of f with y subject to the mass normalization,
entrywise-vanishing localizing conditions for equalities, and PSD moment and
localizing matrices for the inequalities.  The SOS-side lower bound is read
off the solver duals, so a single assembly covers both sides of the pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .conic import ConicProgram, ConicSolution, PsdBlock, SolveOptions, default_backend
from .poly import (Polynomial, SemialgebraicSet, VariableSpace, basis_size,
                   grlex_key, monomial_exponents)


class OrderError(ValueError):
    """Relaxation order too small for a constraint degree."""


@dataclass
class TruncatedMomentSequence:
    """Moments y_alpha for |alpha| <= 2k over an n-dimensional space, graded lex."""

    n: int
    order: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if len(self.values) != basis_size(self.n, 2 * self.order):
            raise ValueError("moment vector length does not match order")

    @classmethod
    def from_atoms(cls, points, weights, order: int) -> "TruncatedMomentSequence":
        """Moments of the atomic measure sum_j w_j * delta(v_j)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        w = np.asarray(weights, dtype=float)
        n = pts.shape[1]
        exps = monomial_exponents(n, 2 * order)
        vals = np.array([sum(wj * np.prod(v ** np.array(e)) for wj, v in zip(w, pts))
                         for e in exps])
        return cls(n, order, vals)

    @classmethod
    def dirac(cls, point, order: int) -> "TruncatedMomentSequence":
        return cls.from_atoms([point], [1.0], order)

    def exponents(self) -> list[tuple[int, ...]]:
        return monomial_exponents(self.n, 2 * self.order)

    def index(self) -> dict[tuple[int, ...], int]:
        return {e: i for i, e in enumerate(self.exponents())}

    def mass(self) -> float:
        return float(self.values[0])

    def first_order_point(self) -> np.ndarray:
        """Degree-1 moments: the mean of any representing measure."""
        return self.values[1:1 + self.n].copy()


def riesz_apply(y: TruncatedMomentSequence, q: Polynomial) -> float:
    """Pair the coefficients of q against y; linear in both arguments."""
    if q.degree() > 2 * y.order:
        raise OrderError(f"degree {q.degree()} exceeds moment order 2k={2 * y.order}")
    idx = y.index()
    total = 0.0
    for e, c in q.sorted_terms():
        total += c * y.values[idx[e]]
    return total


def moment_matrix(y: TruncatedMomentSequence, t: int) -> np.ndarray:
    """Hankel-type matrix over the degree-<=t basis with entries y_{a+b}."""
    if t > y.order:
        raise OrderError("truncation order exceeds the sequence order")
    basis = monomial_exponents(y.n, t)
    idx = y.index()
    s = len(basis)
    M = np.empty((s, s))
    for i, a in enumerate(basis):
        for j in range(i, s):
            b = basis[j]
            v = y.values[idx[tuple(x + z for x, z in zip(a, b))]]
            M[i, j] = M[j, i] = v
    return M


def localizing_matrix(y: TruncatedMomentSequence, p: Polynomial, t: int) -> np.ndarray:
    """Moment matrix of the p-shifted sequence, over the degree-<=t basis."""
    if t < 0:
        raise OrderError("relaxation order too small for this constraint")
    if t + p.half_degree() > y.order:
        raise OrderError("localizing order exceeds the sequence order")
    basis = monomial_exponents(y.n, t)
    idx = y.index()
    s = len(basis)
    M = np.empty((s, s))
    terms = p.sorted_terms()
    for i, a in enumerate(basis):
        for j in range(i, s):
            b = basis[j]
            v = 0.0
            for gme, c in terms:
                key = tuple(x + z + g for x, z, g in zip(a, b, gme))
                v += c * y.values[idx[key]]
            M[i, j] = M[j, i] = v
    return M


@dataclass
class RelaxationProblem:
    """A finitely constrained polynomial problem together with a relaxation order."""

    objective: Polynomial
    constraints: SemialgebraicSet
    order: int

    def __post_init__(self):
        if self.order < self.min_order():
            raise OrderError(
                f"order {self.order} below minimum {self.min_order()} for this problem")

    @property
    def space(self) -> VariableSpace:
        return self.constraints.space

    def base_degree(self) -> int:
        degs = [1] + [p.half_degree() for p in self.constraints.members()]
        return max(degs)

    def objective_half_degree(self) -> int:
        return max(1, self.objective.half_degree())

    def min_order(self) -> int:
        return max(self.objective_half_degree(), self.base_degree())


@dataclass
class RelaxationResult:
    problem: RelaxationProblem
    status: str
    lower_bound: float | None = None          # SOS side, from solver duals
    moment_bound: float | None = None         # achieved moment objective
    y_star: TruncatedMomentSequence | None = None
    rank_profile: list[tuple[int, int]] = field(default_factory=list)  # (t, rank)
    minimizers: list[np.ndarray] = field(default_factory=list)
    weights: list[float] = field(default_factory=list)
    certified: bool = False
    flat_order: int | None = None
    singular_values: dict[int, list[float]] = field(default_factory=dict)
    solution: ConicSolution | None = None


def build_moment_sdp(prob: RelaxationProblem) -> ConicProgram:
    """Assemble the order-k moment SDP as a conic program in the free moments y."""
    n = prob.space.dim
    k = prob.order
    exps = monomial_exponents(n, 2 * k)
    idx = {e: i for i, e in enumerate(exps)}
    nvars = len(exps)
    c = np.zeros(nvars)
    if prob.objective.degree() > 2 * k:
        raise OrderError("objective degree exceeds 2k")
    for e, coef in prob.objective.terms.items():
        c[idx[e]] += coef
    prog = ConicProgram(nvars, c)
    # mass normalization <1, y> = 1
    prog.add_equality({idx[(0,) * n]: 1.0}, 1.0)
    # equality constraints: the h-shifted sequence vanishes entrywise
    for h in prob.constraints.equalities:
        t = k - h.half_degree()
        if t < 0:
            raise OrderError(f"order {k} too small for equality {h.to_string()}")
        for s in monomial_exponents(n, 2 * t):
            row: dict[int, float] = {}
            for ge, coef in h.sorted_terms():
                key = idx[tuple(a + b for a, b in zip(s, ge))]
                row[key] = row.get(key, 0.0) + coef
            prog.add_equality(row, 0.0)
    # moment matrix block
    basis_k = monomial_exponents(n, k)
    blk = PsdBlock(len(basis_k))
    for i, a in enumerate(basis_k):
        for j in range(i, len(basis_k)):
            blk.add(idx[tuple(x + z for x, z in zip(a, basis_k[j]))], i, j, 1.0)
    prog.blocks.append(blk)
    # localizing blocks for inequalities
    for g in prob.constraints.inequalities:
        t = k - g.half_degree()
        if t < 0:
            raise OrderError(f"order {k} too small for inequality {g.to_string()}")
        basis_t = monomial_exponents(n, t)
        lb = PsdBlock(len(basis_t))
        for i, a in enumerate(basis_t):
            for j in range(i, len(basis_t)):
                b = basis_t[j]
                for ge, coef in g.sorted_terms():
                    lb.add(idx[tuple(x + z + w for x, z, w in zip(a, b, ge))], i, j, coef)
        prog.blocks.append(lb)
    return prog


GAP_TOL = 1e-7
# ceiling on (conic rows + moment variables): beyond this the interior-point
# factorization fill-in exhausts memory, so escalation stops instead
SIZE_CAP = 25000


def solve_relaxation(prob: RelaxationProblem, backend=None,
                     options: SolveOptions | None = None,
                     extract: bool = True,
                     extraction_seed: int = 0) -> RelaxationResult:
    """Solve the order-k moment SDP; certify and extract minimizers when flat.

    Returns statuses ``optimal``, ``infeasible`` (the feasible set is empty at
    this order), ``unbounded`` or ``numerical_error``.
    """
    from . import extract as ex

    backend = backend or default_backend()
    prog = build_moment_sdp(prob)
    nrows = len(prog.eq_rows) + sum(b.size * (b.size + 1) // 2 for b in prog.blocks)
    if nrows + prog.num_vars > SIZE_CAP:
        raise OrderError(
            f"relaxation at order {prob.order} needs {nrows} conic rows over "
            f"{prog.num_vars} moments, beyond the tractable ceiling {SIZE_CAP}")
    sol = backend.solve(prog, options)
    res = RelaxationResult(problem=prob, status=sol.status, solution=sol)
    if sol.status == "unbounded":
        res.moment_bound = -np.inf
        return res
    if sol.status != "optimal":
        return res
    n = prob.space.dim
    y = TruncatedMomentSequence(n, prob.order, sol.y)
    res.y_star = y
    res.moment_bound = sol.objective
    res.lower_bound = sol.dual_objective
    d = prob.base_degree()
    for t in range(prob.order + 1):
        M = moment_matrix(y, t)
        r, sv = ex.numerical_rank(M, return_singular=True)
        res.rank_profile.append((t, r))
        res.singular_values[t] = sv
    if extract:
        # certification runs at the solver-noise-aware rank tolerance; the
        # reported profile above keeps the strict default for auditing
        t = ex.check_flat_truncation(y, d, prob.order,
                                     min_t=max(prob.objective_half_degree(), d),
                                     tol_ratio=ex.FTC_RANK_TOL)
        if t is not None:
            res.flat_order = t
            atoms = ex.extract_minimizers(y, t, d, constraints=prob.constraints,
                                          seed=extraction_seed,
                                          tol_ratio=ex.FTC_RANK_TOL)
            if atoms is not None and atoms.points:
                res.minimizers = [np.asarray(p) for p in atoms.points]
                res.weights = list(atoms.weights)
                res.certified = True
    return res


def lasserre_minimize(objective: Polynomial, constraints: SemialgebraicSet,
                      order_cap: int = 6, backend=None,
                      options: SolveOptions | None = None,
                      start_order: int | None = None,
                      extraction_seed: int = 0) -> RelaxationResult:
    """Escalate the relaxation order until flat truncation certifies, or cap.

    This is the standard hierarchy driver: solve at order k, check flatness,
    extract minimizers on success, otherwise raise k.  The last result is
    returned when the cap is reached without certification.
    """
    d0 = max(1, max(1, objective.half_degree()),
             *[p.half_degree() for p in constraints.members()] or [1])
    k = start_order if start_order is not None else d0
    k = max(k, d0)
    last = None
    while k <= max(order_cap, k):
        prob = RelaxationProblem(objective, constraints, k)
        try:
            res = solve_relaxation(prob, backend=backend, options=options,
                                   extraction_seed=extraction_seed)
        except OrderError:
            break
        if res.status in ("infeasible", "unbounded"):
            return res
        if res.status == "optimal":
            last = res
            if res.certified:
                return res
        elif last is None:
            last = res
        if k >= order_cap:
            break
        k += 1
    return last if last is not None else res
