"""Linear-matrix-inequality conic programs and the interior-point backend.

A :class:`ConicProgram` is ``min c.y`` over free variables ``y`` subject to
affine equality rows and PSD constraints ``A0 + sum_i y_i A_i >= 0``.  The
solve path hands the program to Clarabel, a primal-dual interior-point
solver with a homogeneous embedding, so infeasibility and unboundedness come
back as certificates rather than numerical noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

try:
    import clarabel
except ImportError:  # pragma: no cover
    clarabel = None

_SQRT2 = np.sqrt(2.0)


class ConicError(ValueError):
    pass


@dataclass
class PsdBlock:
    """Affine symmetric matrix map ``y -> A0 + sum_i y_i A_i`` of given size.

    ``entries`` maps a variable index (or -1 for the constant part A0) to a
    list of upper-triangle triples ``(i, j, coeff)`` with ``i <= j``.
    """

    size: int
    entries: dict[int, list[tuple[int, int, float]]] = field(default_factory=dict)

    def add(self, var: int, i: int, j: int, c: float):
        if i > j:
            i, j = j, i
        self.entries.setdefault(var, []).append((i, j, float(c)))

    def matrix(self, y: np.ndarray) -> np.ndarray:
        M = np.zeros((self.size, self.size))
        for var, triples in self.entries.items():
            w = 1.0 if var < 0 else y[var]
            if w == 0.0:
                continue
            for i, j, c in triples:
                M[i, j] += w * c
                if i != j:
                    M[j, i] += w * c
        return M


@dataclass
class ConicProgram:
    """``min c.y`` s.t. ``eq_rows y = eq_rhs`` and every PSD block is >= 0."""

    num_vars: int
    objective: np.ndarray
    blocks: list[PsdBlock] = field(default_factory=list)
    eq_rows: list[dict[int, float]] = field(default_factory=list)
    eq_rhs: list[float] = field(default_factory=list)

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        if self.objective.shape != (self.num_vars,):
            raise ConicError("objective length mismatch")

    def add_equality(self, row: dict[int, float], rhs: float):
        self.eq_rows.append({int(k): float(v) for k, v in row.items()})
        self.eq_rhs.append(float(rhs))

    def validate(self):
        if not self.blocks and not self.eq_rows:
            raise ConicError("program has no constraints")
        for b in self.blocks:
            for var in b.entries:
                if var >= self.num_vars:
                    raise ConicError("block refers to unknown variable")


@dataclass
class ConicSolution:
    status: str  # optimal | infeasible | unbounded | max_iter | numerical_error
    y: np.ndarray | None = None
    objective: float | None = None
    dual_objective: float | None = None
    dual_matrices: list[np.ndarray] = field(default_factory=list)
    eq_duals: np.ndarray | None = None
    primal_residual: float = np.inf
    dual_residual: float = np.inf
    gap: float = np.inf
    iterations: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def _svec_index(n: int) -> list[tuple[int, int]]:
    # Clarabel PSD triangle: upper triangle stacked column-wise.
    return [(i, j) for j in range(n) for i in range(j + 1)]


def svec(M: np.ndarray) -> np.ndarray:
    n = M.shape[0]
    out = np.empty(n * (n + 1) // 2)
    for k, (i, j) in enumerate(_svec_index(n)):
        out[k] = M[i, j] * (1.0 if i == j else _SQRT2)
    return out


def smat(v: np.ndarray, n: int) -> np.ndarray:
    M = np.zeros((n, n))
    for k, (i, j) in enumerate(_svec_index(n)):
        if i == j:
            M[i, j] = v[k]
        else:
            M[i, j] = M[j, i] = v[k] / _SQRT2
    return M


@dataclass
class SolveOptions:
    tol: float = 1e-9
    max_iter: int = 200
    verbose: bool = False


class ClarabelBackend:
    """Interior-point solve of a :class:`ConicProgram` via Clarabel."""

    def __init__(self, options: SolveOptions | None = None):
        if clarabel is None:  # pragma: no cover
            raise ConicError("clarabel is not installed")
        self.options = options or SolveOptions()

    def solve(self, prog: ConicProgram, options: SolveOptions | None = None) -> ConicSolution:
        opts = options or self.options
        prog.validate()
        m = prog.num_vars
        rows, cols, vals, b = [], [], [], []
        cones = []
        nrow = 0
        if prog.eq_rows:
            for r, (row, rhs) in enumerate(zip(prog.eq_rows, prog.eq_rhs)):
                for v, c in row.items():
                    rows.append(nrow + r)
                    cols.append(v)
                    vals.append(c)
                b.append(rhs)
            nrow += len(prog.eq_rows)
            cones.append(clarabel.ZeroConeT(len(prog.eq_rows)))
        tri_index = {}
        for blk in prog.blocks:
            n = blk.size
            idx = {(i, j): k for k, (i, j) in enumerate(_svec_index(n))}
            tri_index[id(blk)] = idx
            accum: dict[tuple[int, int], float] = {}
            for var, triples in blk.entries.items():
                for i, j, c in triples:
                    key = (var, idx[(i, j)])
                    accum[key] = accum.get(key, 0.0) + c * (1.0 if i == j else _SQRT2)
            bvals = np.zeros(len(idx))
            for (var, k), c in accum.items():
                if var < 0:
                    bvals[k] += c
                else:
                    rows.append(nrow + k)
                    cols.append(var)
                    vals.append(-c)
            b.extend(bvals.tolist())
            nrow += len(idx)
            cones.append(clarabel.PSDTriangleConeT(n))
        A = sp.csc_matrix((vals, (rows, cols)), shape=(nrow, m))
        P = sp.csc_matrix((m, m))
        settings = clarabel.DefaultSettings()
        settings.verbose = opts.verbose
        settings.max_iter = opts.max_iter
        settings.tol_gap_abs = opts.tol
        settings.tol_gap_rel = opts.tol
        settings.tol_feas = opts.tol
        solver = clarabel.DefaultSolver(P, np.asarray(prog.objective), A, np.asarray(b), cones, settings)
        sol = solver.solve()
        status = str(sol.status)
        mapping = {
            "Solved": "optimal",
            "AlmostSolved": "optimal",
            "PrimalInfeasible": "infeasible",
            "AlmostPrimalInfeasible": "infeasible",
            "DualInfeasible": "unbounded",
            "AlmostDualInfeasible": "unbounded",
            "MaxIterations": "max_iter",
        }
        out = ConicSolution(status=mapping.get(status, "numerical_error"))
        out.iterations = sol.iterations
        if out.status in ("infeasible", "unbounded"):
            return out
        y = np.asarray(sol.x)
        z = np.asarray(sol.z)
        out.y = y
        out.objective = float(prog.objective @ y)
        out.dual_objective = float(-np.asarray(b) @ z)
        off = 0
        if prog.eq_rows:
            out.eq_duals = z[:len(prog.eq_rows)]
            off = len(prog.eq_rows)
        pres = 0.0
        for row, rhs in zip(prog.eq_rows, prog.eq_rhs):
            pres = max(pres, abs(sum(y[v] * c for v, c in row.items()) - rhs))
        for blk in prog.blocks:
            n = blk.size
            ln = n * (n + 1) // 2
            out.dual_matrices.append(smat(z[off:off + ln], n))
            M = blk.matrix(y)
            if n > 0:
                w = np.linalg.eigvalsh(M)
                pres = max(pres, -min(w.min(), 0.0))
            off += ln
        # dual residual: c + A^T z should vanish over the free variables
        dres = float(np.max(np.abs(prog.objective + A.T @ z))) if nrow else np.inf
        out.primal_residual = pres
        out.dual_residual = dres
        out.gap = abs(out.objective - out.dual_objective)
        if out.status == "max_iter" and out.gap <= 1e-6 * (1 + abs(out.objective)):
            out.status = "optimal"
        return out


_default_backend: ClarabelBackend | None = None


def default_backend() -> ClarabelBackend:
    global _default_backend
    if _default_backend is None:
        _default_backend = ClarabelBackend()
    return _default_backend
