"""Jacobian-augmented relaxation for guaranteed finite convergence.

The hierarchy can converge only asymptotically on awkward problems.  The fix
implemented here appends, for each subset J of inequality constraints, the
maximal minors of the gradient matrix [grad f, grad h, grad g_J] multiplied
by the complementary inequality products.  The augmented feasible set is cut
down to KKT and singular points, where the optimum is attained whenever it
is attained at all, and the plain hierarchy then finishes in finitely many
steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .moment import RelaxationResult, lasserre_minimize
from .poly import Polynomial, SemialgebraicSet


class AugmentationError(ValueError):
    pass


@dataclass
class JacobianAugmentation:
    base_objective: Polynomial
    base_constraints: SemialgebraicSet
    phis: list[Polynomial] = field(default_factory=list)
    provenance: list[tuple[tuple[int, ...], int]] = field(default_factory=list)  # (J, minor ordinal)

    def augmented_constraints(self) -> SemialgebraicSet:
        return SemialgebraicSet(
            self.base_constraints.space,
            equalities=list(self.base_constraints.equalities) + list(self.phis),
            inequalities=list(self.base_constraints.inequalities),
        )


def jacobian_matrix(f: Polynomial, hs: list[Polynomial], gJ: list[Polynomial],
                    space) -> list[list[Polynomial]]:
    """n x (1 + m1 + |J|) matrix whose columns are the gradients of f, h, g_J."""
    cols = [f.gradient(space)] + [h.gradient(space) for h in hs] + [g.gradient(space) for g in gJ]
    n = space.dim
    return [[cols[c][i] for c in range(len(cols))] for i in range(n)]


def _det(mat: list[list[Polynomial]], spaces) -> Polynomial:
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = Polynomial.zero(spaces)
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * _det(minor, spaces)
        total = total + term if j % 2 == 0 else total - term
    return total


def minor_equations(B: list[list[Polynomial]], rho: int) -> list[Polynomial]:
    """All (rho+1) x (rho+1) minors of the polynomial matrix B.

    Returns the empty list when no minors of that size exist (the rank
    condition is vacuous).  Identically zero and duplicate minors are
    dropped.
    """
    rows = len(B)
    cols = len(B[0]) if rows else 0
    s = rho + 1
    if s > rows or s > cols:
        return []
    spaces = None
    for row in B:
        for p in row:
            spaces = p.spaces
            break
        if spaces:
            break
    out: list[Polynomial] = []
    seen = set()
    for ri in combinations(range(rows), s):
        for ci in combinations(range(cols), s):
            sub = [[B[i][j] for j in ci] for i in ri]
            det = _det(sub, spaces)
            if det.is_zero():
                continue
            key = tuple(det.sorted_terms())
            if key in seen:
                continue
            seen.add(key)
            out.append(det)
    return out


def augment(objective: Polynomial, constraints: SemialgebraicSet,
            phi_cap: int = 2000) -> JacobianAugmentation:
    """Build the KKT-restricting equality system for the given problem.

    Requires m1 <= n; the caller asserts that at most n - m1 inequality
    constraints are simultaneously active (the exactness hypothesis), which
    is not verified symbolically.
    """
    space = constraints.space
    n = space.dim
    hs = constraints.equalities
    gs = constraints.inequalities
    m1, m2 = len(hs), len(gs)
    if m1 > n:
        raise AugmentationError(f"{m1} equality constraints exceed the {n} variables")
    aug = JacobianAugmentation(objective, constraints)
    for size in range(0, max(0, n - m1) + 1):
        for J in combinations(range(m2), size):
            B = jacobian_matrix(objective, hs, [gs[j] for j in J], space)
            etas = minor_equations(B, m1 + size)
            if not etas:
                continue
            comp = [gs[j] for j in range(m2) if j not in J]
            for i, eta in enumerate(etas):
                phi = eta
                for g in comp:
                    phi = phi * g
                scale = phi.max_abs_coeff()
                if scale > 0:
                    phi = phi * (1.0 / scale)
                aug.phis.append(phi)
                aug.provenance.append((J, i))
                if len(aug.phis) > phi_cap:
                    raise AugmentationError(
                        f"auxiliary polynomial count exceeded cap {phi_cap} "
                        f"(m1={m1}, m2={m2}, n={n})")
    return aug


def jacobian_minimize(objective: Polynomial, constraints: SemialgebraicSet,
                      order_cap: int = 6, backend=None, options=None,
                      phi_cap: int = 2000,
                      extraction_seed: int = 0) -> RelaxationResult:
    """Augment with the vanishing-minor equalities, then run the hierarchy."""
    aug = augment(objective, constraints, phi_cap=phi_cap)
    return lasserre_minimize(objective, aug.augmented_constraints(),
                             order_cap=order_cap, backend=backend,
                             options=options, extraction_seed=extraction_seed)
