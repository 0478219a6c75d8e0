"""Compactification of noncompact index sets by lifting to the unit sphere.

A polynomial q(u) of degree d lifts to the homogeneous q~(u0, u) with each
term padded by a power of the extra coordinate u0.  The index set is
replaced by the compact slice of the sphere with u0 >= 0, on which the
exchange loop's attainability preconditions hold.  The lifted problem
over-approximates: its optimum can exceed the original one exactly when the
original set fails to be closed at infinity, an assertion this module
records but does not verify.
"""

from __future__ import annotations

import numpy as np

from .poly import Polynomial, PolynomialError, SemialgebraicSet, VariableSpace


def homogenize_poly(q: Polynomial, u_space: VariableSpace,
                    tilde_space: VariableSpace, d: int | None = None,
                    keep_spaces: tuple[VariableSpace, ...] | None = None) -> Polynomial:
    """Lift q to degree d in the tilde space: c u^b -> c u0^(d-|b|) u^b.

    Degrees count only the u block; other blocks (decision variables) ride
    along untouched.  Dehomogenizing at u0 = 1 recovers q exactly.
    """
    du = q.degree_in(u_space)
    if d is None:
        d = max(du, 0)
    if d < du:
        raise PolynomialError("target degree below the u-degree of the polynomial")
    if tilde_space.dim != u_space.dim + 1 or tilde_space.first_index != 0:
        raise PolynomialError("tilde space must add u0 in front of the u block")
    old_spaces = q.spaces
    new_spaces = tuple(tilde_space if s.name == u_space.name else s for s in old_spaces)
    if keep_spaces is not None:
        new_spaces = keep_spaces
    off = 0
    for s in old_spaces:
        if s.name == u_space.name:
            break
        off += s.dim
    else:
        raise PolynomialError(f"polynomial has no {u_space.name!r} block")
    # target offset of the tilde block
    toff = 0
    for s in new_spaces:
        if s.name == tilde_space.name:
            break
        toff += s.dim
    n_new = sum(s.dim for s in new_spaces)
    terms: dict[tuple[int, ...], float] = {}
    for exp, c in q.terms.items():
        ub = exp[off:off + u_space.dim]
        rest = exp[:off] + exp[off + u_space.dim:]
        e = [0] * n_new
        # copy non-u blocks in order
        ri = 0
        pos = 0
        for s in new_spaces:
            if s.name == tilde_space.name:
                e[pos] = d - sum(ub)
                for j, v in enumerate(ub):
                    e[pos + 1 + j] = v
            else:
                for j in range(s.dim):
                    e[pos + j] = rest[ri]
                    ri += 1
            pos += s.dim
        key = tuple(e)
        terms[key] = terms.get(key, 0.0) + c
    return Polynomial(new_spaces, terms)


def tilde_space_for(u_space: VariableSpace) -> VariableSpace:
    return VariableSpace(u_space.name, u_space.dim + 1, first_index=0)


def sphere_equality(tilde: VariableSpace) -> Polynomial:
    s = Polynomial.constant(-1.0, (tilde,))
    for i in range(tilde.dim):
        s = s + Polynomial.variable(tilde, i, (tilde,)) ** 2
    return s


def homogenize_index_set(U: SemialgebraicSet) -> SemialgebraicSet:
    """Lift U to the compact sphere slice: homogenized members, |u~|^2 = 1, u0 >= 0.

    When U is all of R^p (no constraints), the u0 >= 0 half-space restriction
    is unnecessary and omitted.
    """
    u = U.space
    tilde = tilde_space_for(u)
    eqs = [homogenize_poly(h, u, tilde) for h in U.equalities]
    ineqs = [homogenize_poly(g, u, tilde) for g in U.inequalities]
    eqs.append(sphere_equality(tilde))
    if U.equalities or U.inequalities:
        ineqs.append(Polynomial.variable(tilde, 0, (tilde,)))  # u0 >= 0
    return SemialgebraicSet(tilde, equalities=eqs, inequalities=ineqs)


def homogenize_problem(problem):
    """Return the lifted SIPP problem over (x, u~) with a compact index set."""
    from .exchange import SippProblem

    u = problem.u_space
    tilde = tilde_space_for(u)
    d_g = problem.g.degree_in(u)
    g_t = homogenize_poly(problem.g, u, tilde, d=d_g)
    U_t = homogenize_index_set(problem.U)
    return SippProblem(
        name=(problem.name + "-homogenized") if problem.name else "homogenized",
        f=problem.f, g=g_t,
        x_space=problem.x_space, u_space=tilde,
        X=problem.X, U=U_t,
        u_compact=True, x_compact=problem.x_compact,
        closed_at_infinity=problem.closed_at_infinity,
        homogenized=True,
    )


def lift_point(u: np.ndarray) -> np.ndarray:
    """Map a point of U into the sphere slice: (1, u) / sqrt(1 + |u|^2)."""
    u = np.asarray(u, dtype=float)
    v = np.concatenate([[1.0], u])
    return v / np.linalg.norm(v)


def positivity_transfer_check(q: Polynomial, U: SemialgebraicSet,
                              samples: np.ndarray) -> bool:
    """Sign agreement of q on U versus its lift on the sphere slice, at samples.

    A validation utility for the test suite; both sides differ by a strictly
    positive factor, so their signs must match exactly.
    """
    u = U.space
    tilde = tilde_space_for(u)
    d = max(q.degree_in(u), 0)
    qt = homogenize_poly(q, u, tilde, d=d)
    for pt in np.atleast_2d(samples):
        if not U.contains(pt, tol=0.0):
            continue
        a = q({u.name: pt})
        b = qt({tilde.name: lift_point(pt)})
        if np.sign(round(a, 12)) != np.sign(round(b, 12)) and abs(a) > 1e-9:
            return False
    return True
