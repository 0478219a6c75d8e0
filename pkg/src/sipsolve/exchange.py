"""Exchange loop for semi-infinite polynomial programs.

Alternates between the master problem (objective over the decision set with
the coupling constraint enforced at the current finite index list) and the
inner problems (worst-case index value at each master minimizer).  Master
problems are solved with the plain moment hierarchy; inner ones with the
Jacobian-augmented hierarchy, which keeps finite convergence even though the
index set is fixed and the master's constraint count grows.  Inner
minimizers are exchanged into the index list until some master minimizer
certifies nonnegative worst-case value.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

import scipy.optimize

from .jacobian import jacobian_minimize
from .moment import OrderError, RelaxationResult, SolveOptions, lasserre_minimize
from .poly import Polynomial, SemialgebraicSet, VariableSpace

DEDUP_TOL = 1e-7


@dataclass
class SippProblem:
    """min f(x) over X subject to g(x, u) >= 0 for all u in U."""

    f: Polynomial
    g: Polynomial
    x_space: VariableSpace
    X: SemialgebraicSet
    u_space: VariableSpace
    U: SemialgebraicSet
    name: str = ""
    x_compact: bool = True
    u_compact: bool = True
    closed_at_infinity: bool = True
    homogenized: bool = False

    def __post_init__(self):
        names = {s.name for s in self.g.spaces}
        if not names <= {self.x_space.name, self.u_space.name}:
            raise ValueError("coupling constraint ranges over unknown spaces")
        if not self.x_compact:
            raise ValueError("the decision set X must be (asserted) compact")

    def coupling_at(self, u_point) -> Polynomial:
        """g with the index block frozen at a numeric point: a constraint in x."""
        if self.u_space.name not in {s.name for s in self.g.spaces}:
            return self.g
        return self.g.fix(self.u_space, u_point)

    def inner_objective(self, x_point) -> Polynomial:
        """g with the decision block frozen: the inner objective in u."""
        if self.x_space.name not in {s.name for s in self.g.spaces}:
            return self.g
        return self.g.fix(self.x_space, x_point)


@dataclass
class ExchangeOptions:
    eps: float = 1e-4
    k_max: int = 15
    master_order_cap: int = 6
    inner_order_cap: int = 6
    seed: int = 0
    u0: np.ndarray | None = None
    sample_box: float = 10.0
    solver: SolveOptions = field(default_factory=SolveOptions)
    phi_cap: int = 2000


@dataclass
class IterationRecord:
    k: int
    master_bound: float
    master_points: list[np.ndarray]
    master_certified: bool
    inner_values: list[float] = field(default_factory=list)
    inner_points: list[list[np.ndarray]] = field(default_factory=list)
    inner_certified: list[bool] = field(default_factory=list)
    accepted: list[np.ndarray] = field(default_factory=list)
    master_rank_profile: list[tuple[int, int]] = field(default_factory=list)
    master_flat_order: int | None = None


@dataclass
class ExchangeReport:
    status: str  # certified | iteration_cap | master_infeasible | inner_unattained_suspected
    problem: SippProblem
    f_star: float | None = None
    minimizers: list[np.ndarray] = field(default_factory=list)
    obj2: float | None = None
    iterations: int = 0
    index_points: list[np.ndarray] = field(default_factory=list)
    trace: list[IterationRecord] = field(default_factory=list)
    detail: str = ""
    wall_time: float = 0.0

    @property
    def certified(self) -> bool:
        return self.status == "certified"


def _dedup_add(points: list[np.ndarray], new: np.ndarray) -> bool:
    for p in points:
        if np.max(np.abs(p - new)) <= DEDUP_TOL:
            return False
    points.append(np.asarray(new, dtype=float))
    return True


def _is_sphere_slice(U: SemialgebraicSet) -> bool:
    """True when the only equality pins the index vector to the unit sphere,
    so Gaussian-normalize sampling lands on the set's equality part."""
    if len(U.equalities) != 1:
        return False
    h = U.equalities[0]
    want = {tuple(2 if j == i else 0 for j in range(U.space.dim)): 1.0
            for i in range(U.space.dim)}
    want[tuple([0] * U.space.dim)] = -1.0
    got = {exp: c for exp, c in h.terms.items()}
    if set(got) != set(want):
        return False
    return all(abs(got[e] - want[e]) < 1e-12 for e in want)


def sample_index_point(U: SemialgebraicSet, rng: np.random.Generator,
                       box: float = 10.0, sphere: bool = False,
                       tries: int = 20000) -> np.ndarray:
    """Draw one point of U: sphere-aware for homogenized sets, else rejection
    sampling in a bounding box (inequality-only sets)."""
    p = U.space.dim
    if sphere or _is_sphere_slice(U):
        for _ in range(tries):
            v = rng.standard_normal(p)
            v /= np.linalg.norm(v)
            if U.space.first_index == 0 and v[0] < 0:
                v = -v
            if all(g({U.space.name: v}) >= 0 for g in U.inequalities):
                return v
        raise RuntimeError("failed to sample the homogenized index set")
    if U.equalities:
        raise RuntimeError(
            "cannot rejection-sample an equality-constrained index set; supply u0")
    for _ in range(tries):
        v = rng.uniform(-box, box, size=p)
        if U.contains(v):
            return v
    raise RuntimeError("failed to sample the index set within the bounding box")


def _poly_fun(p: Polynomial, space: VariableSpace):
    grads = p.gradient(space)
    fun = lambda x: p({space.name: x})
    jac = lambda x: np.array([g({space.name: x}) for g in grads])
    return fun, jac


def polish_point(objective: Polynomial, cons: SemialgebraicSet,
                 x0: np.ndarray, tol: float = 1e-9):
    """Refine a candidate minimizer with a local NLP solve (exact gradients).

    The moment relaxation supplies a valid lower bound but its argmin carries
    interior-point noise, especially on wide boxes; a short SLSQP run from
    the candidate recovers the locally exact point.  Returns the refined
    point, or None when the local solve fails or leaves feasibility.
    """
    space = cons.space
    f, fj = _poly_fun(objective, space)
    nlcons = []
    for h in cons.equalities:
        hf, hj = _poly_fun(h, space)
        nlcons.append({"type": "eq", "fun": hf, "jac": hj})
    for g in cons.inequalities:
        gf, gj = _poly_fun(g, space)
        nlcons.append({"type": "ineq", "fun": gf, "jac": gj})
    try:
        r = scipy.optimize.minimize(f, np.asarray(x0, dtype=float), jac=fj,
                                    constraints=nlcons, method="SLSQP",
                                    options={"maxiter": 300, "ftol": tol})
    except (ValueError, OverflowError):
        return None
    if not r.success:
        return None
    scale = 1.0 + abs(r.fun)
    if cons.violation(r.x) > 1e-7 * scale:
        return None
    return np.asarray(r.x, dtype=float)


def solve_master(problem: SippProblem, index_points: list[np.ndarray],
                 opts: ExchangeOptions, backend=None):
    """Solve the discretized master problem.

    Returns (bound, points, certified, result).  When flat truncation fails
    at the order cap, falls back to the first-order moment point as an
    uncertified candidate so the loop can keep generating cuts.
    """
    from .moment import RelaxationProblem, solve_relaxation

    cons = SemialgebraicSet(
        problem.x_space,
        equalities=list(problem.X.equalities),
        inequalities=list(problem.X.inequalities)
        + [problem.coupling_at(u) for u in index_points],
    )
    d0 = max(1, problem.f.half_degree(),
             *[p.half_degree() for p in cons.members()] or [1])
    res = None
    best_val, best_pts = np.inf, []
    for k in range(d0, max(opts.master_order_cap, d0) + 1):
        try:
            res = solve_relaxation(RelaxationProblem(problem.f, cons, k),
                                   backend=backend, options=opts.solver)
        except OrderError:
            break
        if res.status in ("infeasible", "unbounded"):
            return None, [], False, res, res.status
        if res.status != "optimal":
            continue
        cands = [np.asarray(p) for p in res.minimizers]
        if not cands and res.y_star is not None:
            cands = [res.y_star.first_order_point()]
        for p in cands:
            q = polish_point(problem.f, cons, p)
            q = q if q is not None else p
            v = problem.f({problem.x_space.name: q})
            if cons.violation(q) <= 1e-6 * (1.0 + abs(v)) and v < best_val - 1e-12:
                best_val, best_pts = v, [q]
        if res.certified:
            # prefer the value achieved at a verified feasible point; the
            # relaxation bound can sit slightly below it at solver accuracy
            if best_pts:
                return best_val, best_pts, True, res, res.status
            return res.moment_bound, cands, True, res, res.status
        # gap certificate: the relaxation bound has reached the value of a
        # locally refined feasible point, so that point is globally optimal
        # for the discretized master even though flat truncation failed
        if best_pts and res.moment_bound >= best_val - 1e-6 * (1.0 + abs(best_val)):
            return best_val, best_pts, True, res, res.status
    if res is None:
        return None, [], False, None, "numerical_error"
    if best_pts:
        return best_val, best_pts, False, res, res.status
    if res.status == "optimal" and res.y_star is not None:
        return res.moment_bound, [res.y_star.first_order_point()], False, res, res.status
    return None, [], False, res, res.status


def solve_inner(problem: SippProblem, x_point: np.ndarray,
                opts: ExchangeOptions, backend=None):
    """Certified worst-case index value at a fixed decision point."""
    gu = problem.inner_objective(x_point)
    res = jacobian_minimize(gu, problem.U, order_cap=opts.inner_order_cap,
                            backend=backend, options=opts.solver,
                            phi_cap=opts.phi_cap)
    if res is None:
        return None, [], False
    if res.status == "unbounded":
        return -np.inf, [], False
    if res.status != "optimal":
        return None, [], False
    pts = [np.asarray(p) for p in res.minimizers]
    if not pts:
        # the bound is still valid without extraction; recover index points to
        # exchange by descending locally from the moment candidate and a few
        # feasible samples
        rng = np.random.default_rng(opts.seed + 1)
        starts = []
        if res.y_star is not None:
            starts.append(res.y_star.first_order_point())
        sphere = problem.homogenized or _is_sphere_slice(problem.U)
        for _ in range(8):
            try:
                starts.append(sample_index_point(problem.U, rng,
                                                 box=opts.sample_box,
                                                 sphere=sphere))
            except RuntimeError:
                break
        for s in starts:
            q = polish_point(gu, problem.U, s)
            if q is not None and gu({problem.u_space.name: q}) < -opts.eps:
                _dedup_add(pts, q)
    return res.moment_bound, pts, res.certified


def _violation_scan(problem: SippProblem, x_point: np.ndarray, eps: float,
                    box: float, rng: np.random.Generator, samples: int = 20000) -> bool:
    """Randomized feasibility audit over a bounding box of the raw index set.

    Used when the index set was declared noncompact but the problem was run
    without homogenization; catches accepted points whose inner optimum is
    finite only as an infimum.
    """
    gu = problem.inner_objective(x_point)
    name = problem.u_space.name
    p = problem.u_space.dim
    for _ in range(samples):
        u = rng.uniform(-box, box, size=p)
        if not problem.U.contains(u):
            continue
        if gu({name: u}) < -10 * eps:
            return True
    return False


def exchange_loop(problem: SippProblem, opts: ExchangeOptions | None = None,
                  backend=None) -> ExchangeReport:
    """Run the full exchange iteration until certification or a stop condition."""
    opts = opts or ExchangeOptions()
    rng = np.random.default_rng(opts.seed)
    t0 = time.time()
    if opts.u0 is not None:
        u0 = np.asarray(opts.u0, dtype=float)
    else:
        u0 = sample_index_point(problem.U, rng, box=opts.sample_box,
                                sphere=problem.homogenized)
    index_points: list[np.ndarray] = [u0]
    accepted: list[np.ndarray] = []
    report = ExchangeReport(status="iteration_cap", problem=problem,
                            index_points=index_points)
    k = 0
    prev_bound = -np.inf
    while True:
        bound, pts, mcert, mres, mstatus = solve_master(problem, index_points, opts,
                                                        backend=backend)
        if mstatus == "infeasible":
            report.status = "master_infeasible"
            report.detail = ("master problem infeasible: either (P) is infeasible "
                             "or the lifted index set is strictly larger than the "
                             "closure of the original one")
            report.iterations = k
            break
        if bound is None:
            report.status = "iteration_cap"
            report.detail = f"master solve failed with status {mstatus}"
            report.iterations = k
            break
        rec = IterationRecord(k=k, master_bound=bound, master_points=pts,
                              master_certified=mcert)
        if mres is not None:
            rec.master_rank_profile = list(mres.rank_profile)
            rec.master_flat_order = mres.flat_order
        report.trace.append(rec)
        prev_bound = max(prev_bound, bound)
        grew = False
        obj2 = None
        for x_pt in pts:
            g_val, t_pts, icert = solve_inner(problem, x_pt, opts, backend=backend)
            rec.inner_values.append(g_val if g_val is not None else np.nan)
            rec.inner_points.append(t_pts)
            rec.inner_certified.append(icert)
            if g_val is None:
                continue
            for u_pt in t_pts:
                grew |= _dedup_add(index_points, u_pt)
            if g_val >= -opts.eps and np.isfinite(g_val):
                if _dedup_add(accepted, x_pt):
                    rec.accepted.append(x_pt)
                obj2 = g_val if obj2 is None else min(obj2, g_val)
        report.iterations = k + 1
        if accepted:
            report.status = "certified"
            report.minimizers = list(accepted)
            report.f_star = bound
            report.obj2 = obj2
            break
        if not grew:
            report.status = "inner_unattained_suspected"
            report.detail = ("index list stagnated with no accepted point; the "
                             "inner optimum is likely unattained -- consider "
                             "homogenizing the index set")
            break
        if k >= opts.k_max:
            report.status = "iteration_cap"
            break
        k += 1
    # wrong-answer audit for noncompact index sets run without homogenization
    if (report.status == "certified" and not problem.u_compact
            and not problem.homogenized):
        bad = any(_violation_scan(problem, x, opts.eps, opts.sample_box, rng)
                  for x in report.minimizers)
        if bad:
            report.status = "inner_unattained_suspected"
            report.detail = ("accepted point violates the semi-infinite constraint "
                             "on a sampled index point: the inner problems' optima "
                             "are not attained over the noncompact index set -- "
                             "homogenize and re-run")
    report.wall_time = time.time() - t0
    return report
