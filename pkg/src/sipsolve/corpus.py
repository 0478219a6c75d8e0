"""Built-in benchmark corpus.

Small named semi-infinite and matrix-inequality problems with known optima,
used by the regression suite and the ``corpus run`` command.  Each entry
bundles the problem, a deterministic starting index point, solver-option
overrides, and the values a correct run must reproduce.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exchange import ExchangeOptions, SippProblem
from .homogenize import homogenize_problem
from .pmi import PolynomialMatrix, pmi_to_sipp
from .poly import Polynomial, SemialgebraicSet, VariableSpace, parse_polynomial


@dataclass
class CorpusEntry:
    name: str
    problem: SippProblem
    options: ExchangeOptions
    expect_status: str = "certified"
    f_star: float | None = None
    x_star: np.ndarray | None = None
    f_tol: float = 1e-3
    x_tol: float = 5e-3
    obj2_floor: float = -1e-4
    iter_cap: int | None = None
    note: str = ""


def _box(space: VariableSpace, half_width: float) -> list[Polynomial]:
    """Per-coordinate bounds half_width^2 - x_i^2 >= 0."""
    out = []
    for i in range(space.dim):
        xi = Polynomial.variable(space, i, (space,))
        out.append(Polynomial.constant(half_width ** 2, (space,)) - xi * xi)
    return out


def _interval(space: VariableSpace, lo: float, hi: float) -> Polynomial:
    t = Polynomial.variable(space, 0, (space,))
    return (t - Polynomial.constant(lo, (space,))) * (Polynomial.constant(hi, (space,)) - t)


def _vars(space, spaces):
    return [Polynomial.variable(space, i, spaces) for i in range(space.dim)]


def _c(v, spaces):
    return Polynomial.constant(v, spaces)


def sin_taylor3(u):
    """u - u^3/6 on the polynomial ring of u."""
    return u - (1.0 / 6.0) * u ** 3


def sin_taylor5(u):
    return u - (1.0 / 6.0) * u ** 3 + (1.0 / 120.0) * u ** 5


def cos_taylor4(u):
    one = Polynomial.constant(1.0, u.spaces)
    return one - 0.5 * u ** 2 + (1.0 / 24.0) * u ** 4


def _sip01() -> CorpusEntry:
    x = VariableSpace("x", 2)
    u = VariableSpace("u", 1)
    sp = (x, u)
    x1, x2 = _vars(x, sp)
    (u1,) = _vars(u, sp)
    f = parse_polynomial("1/3 x1^2 + 1/2 x1 + x2^2 - x2", [x])
    g = -x1 ** 2 - 2.0 * x1 * x2 * u1 ** 2 + sin_taylor3(u1)
    prob = SippProblem(name="sip01", f=f, g=g, x_space=x,
                       X=SemialgebraicSet(x, inequalities=_box(x, 100.0)),
                       u_space=u,
                       U=SemialgebraicSet(u, inequalities=[_interval(u, 0.0, 2.0)]))
    return CorpusEntry("sip01", prob, ExchangeOptions(u0=np.array([1.0])),
                       f_star=-0.2504, x_star=np.array([-0.0008, 0.4999]),
                       iter_cap=6, note="quadratic objective, cubic sine cut")


def _sip02() -> CorpusEntry:
    x = VariableSpace("x", 2)
    u = VariableSpace("u", 1)
    sp = (x, u)
    x1, x2 = _vars(x, sp)
    (u1,) = _vars(u, sp)
    f = parse_polynomial("1/3 x1^2 + x2^2 + 1/2 x1", [x])
    one = _c(1.0, sp)
    g = -(one - x1 ** 2 * u1 ** 2) ** 2 + x1 * u1 ** 2 + x2 ** 2 - x2
    prob = SippProblem(name="sip02", f=f, g=g, x_space=x,
                       X=SemialgebraicSet(x, inequalities=_box(x, 100.0)),
                       u_space=u,
                       U=SemialgebraicSet(u, inequalities=[_interval(u, 0.0, 1.0)]))
    return CorpusEntry("sip02", prob, ExchangeOptions(u0=np.array([0.5])),
                       f_star=0.1945, x_star=np.array([-0.7500, -0.6180]),
                       iter_cap=6, note="quartic coupling on the unit interval")


def _sip03() -> CorpusEntry:
    x = VariableSpace("x", 3)
    u = VariableSpace("u", 1)
    sp = (x, u)
    x1, x2, x3 = _vars(x, sp)
    (u1,) = _vars(u, sp)
    f = parse_polynomial("x1^2 + x2^2 + x3^2", [x])
    one = _c(1.0, sp)
    expu = (one + x3 * u1 + 0.5 * x3 ** 2 * u1 ** 2
            + (1.0 / 6.0) * x3 ** 3 * u1 ** 3 + (1.0 / 24.0) * x3 ** 4 * u1 ** 4)
    e2u = (one + 2.0 * u1 + 2.0 * u1 ** 2 + (4.0 / 3.0) * u1 ** 3
           + (2.0 / 3.0) * u1 ** 4)
    s4u = 4.0 * u1 - (32.0 / 3.0) * u1 ** 3
    g = -x1 - x2 * expu - e2u + 2.0 * s4u
    prob = SippProblem(name="sip03", f=f, g=g, x_space=x,
                       X=SemialgebraicSet(x, inequalities=_box(x, 100.0)),
                       u_space=u,
                       U=SemialgebraicSet(u, inequalities=[_interval(u, 0.0, 1.0)]))
    return CorpusEntry("sip03", prob, ExchangeOptions(u0=np.array([0.5])),
                       f_star=9.6973, x_star=np.array([-0.1514, -1.7484, 2.5725]),
                       iter_cap=6, note="exp/sine Taylor models, degree-7 coupling")


def _sip04() -> CorpusEntry:
    x = VariableSpace("x", 3)
    u = VariableSpace("u", 2)
    sp = (x, u)
    x1, x2, x3 = _vars(x, sp)
    u1, u2 = _vars(u, sp)
    f = parse_polynomial("x1^2 + x2^2 + x3^2", [x])
    one = _c(1.0, sp)
    g = (-x1 * (u1 + u2 ** 2 + one) - x2 * (u1 * u2 - u2 ** 2)
         - x3 * (u1 * u2 + u2 ** 2 + u2) - one)
    prob = SippProblem(name="sip04", f=f, g=g, x_space=x,
                       X=SemialgebraicSet(x, inequalities=_box(x, 100.0)),
                       u_space=u,
                       U=SemialgebraicSet(u, inequalities=[
                           _interval_of(u, 0, 0.0, 1.0),
                           _interval_of(u, 1, 0.0, 1.0)]))
    return CorpusEntry("sip04", prob, ExchangeOptions(u0=np.array([0.5, 0.5])),
                       f_star=1.0, x_star=np.array([-1.0, 0.0, 0.0]),
                       iter_cap=6, note="two-dimensional index box")


def _interval_of(space, i, lo, hi, spaces=None):
    spaces = spaces or (space,)
    t = Polynomial.variable(space, i, spaces)
    return (t - Polynomial.constant(lo, spaces)) * (Polynomial.constant(hi, spaces) - t)


def _sip05() -> CorpusEntry:
    x = VariableSpace("x", 2)
    u = VariableSpace("u", 1)
    sp = (x, u)
    x1, x2 = _vars(x, sp)
    (u1,) = _vars(u, sp)
    f = parse_polynomial("x2^2 - 4 x2", [x])
    g = -x1 * cos_taylor4(u1) - x2 * sin_taylor3(u1)
    prob = SippProblem(name="sip05", f=f, g=g, x_space=x,
                       X=SemialgebraicSet(x, inequalities=_box(x, 100.0)),
                       u_space=u,
                       U=SemialgebraicSet(u, inequalities=[_interval(u, 0.0, np.pi)]))
    return CorpusEntry("sip05", prob, ExchangeOptions(u0=np.array([1.0])),
                       f_star=0.0, x_star=np.array([0.0, 0.0]),
                       iter_cap=6,
                       note="homogeneous trig cut: origin is the only feasible point")


def _sip06() -> CorpusEntry:
    x = VariableSpace("x", 3)
    u = VariableSpace("u", 1)
    sp = (x, u)
    x1, x2, x3 = _vars(x, sp)
    (u1,) = _vars(u, sp)
    two = Polynomial.constant(2.0, (x,))
    xx1 = Polynomial.variable(x, 0, (x,))
    xx2 = Polynomial.variable(x, 1, (x,))
    xx3 = Polynomial.variable(x, 2, (x,))
    f = (xx1 + xx2 - two) ** 2 + (xx1 - xx2) ** 2 + 30.0 * xx3 ** 2
    g = -x1 * cos_taylor4(u1) - x2 * sin_taylor5(u1)
    X = SemialgebraicSet(
        x,
        equalities=[xx3 ** 2 - (xx1 - xx2) ** 2],
        inequalities=_box(x, 100.0) + [xx3])
    prob = SippProblem(name="sip06", f=f, g=g, x_space=x, X=X, u_space=u,
                       U=SemialgebraicSet(u, inequalities=[_interval(u, 0.0, np.pi)]))
    return CorpusEntry("sip06", prob, ExchangeOptions(u0=np.array([1.0])),
                       f_star=4.0, x_star=np.array([0.0, 0.0, 0.0]),
                       iter_cap=6,
                       note="min(0, x1-x2) modeled by a signed auxiliary variable")


def _sip07() -> CorpusEntry:
    x = VariableSpace("x", 2)
    u = VariableSpace("u", 1)
    sp = (x, u)
    x1, x2 = _vars(x, sp)
    (u1,) = _vars(u, sp)
    f = parse_polynomial("x2", [x])
    g = -2.0 * x1 ** 2 * u1 ** 2 + u1 ** 4 - x1 ** 2 + x2
    prob = SippProblem(name="sip07", f=f, g=g, x_space=x,
                       X=SemialgebraicSet(x, inequalities=_box(x, 100.0)),
                       u_space=u,
                       U=SemialgebraicSet(u, inequalities=[_interval(u, -1.0, 1.0)]))
    return CorpusEntry("sip07", prob, ExchangeOptions(u0=np.array([0.5])),
                       f_star=0.0, x_star=np.array([0.0, 0.0]),
                       iter_cap=6, note="quartic envelope touching zero at the origin")


def _pmi_3x3() -> CorpusEntry:
    x = VariableSpace("x", 2)
    P = lambda s: parse_polynomial(s, [x])
    G = PolynomialMatrix(3, {
        (0, 0): P("4 - x1^2 - x2^2"), (0, 1): P("x1"), (0, 2): P("x2"),
        (1, 1): P("x2^2 - x1"), (1, 2): P("x1 x2"),
        (2, 2): P("x1^2 - x2")})
    X = SemialgebraicSet(x, inequalities=[P("4 - x1 - x2")])
    prob = pmi_to_sipp(P("x1 + x2"), G, X, name="pmi-3x3")
    return CorpusEntry("pmi-3x3", prob,
                       ExchangeOptions(seed=1, eps=1e-5, k_max=25, inner_order_cap=4),
                       x_star=np.array([-1.2853, -1.2763]),
                       note="linear objective under a 3x3 matrix inequality")


def _pmi_4x4() -> CorpusEntry:
    x = VariableSpace("x", 2)
    P = lambda s: parse_polynomial(s, [x])
    G = PolynomialMatrix(4, {
        (0, 0): P("10 - x1^2 - x2^2"), (0, 1): P("x1"),
        (0, 2): P("- x1^2 + x2"), (0, 3): P("x2 + 3"),
        (1, 1): P("x2^2"), (1, 2): P("x1 - x2^2"), (1, 3): P("x1"),
        (2, 2): P("x1 + 2 x2^2"), (2, 3): P("x2"),
        (3, 3): P("x2^2")})
    X = SemialgebraicSet(x, inequalities=[P("10 - x1^2 - x2^2")])
    prob = pmi_to_sipp(P("x1 - x2"), G, X, name="pmi-4x4")
    # Reference optimum confirmed by direct eigenvalue optimization: SLSQP on
    # min x1 - x2 s.t. lambda_min(G(x)) >= 0 from a fine grid scan gives
    # f* = 1.031274 at (0.083941, -0.947333), an active boundary point.
    return CorpusEntry("pmi-4x4", prob,
                       ExchangeOptions(seed=1, eps=1e-7, k_max=30, inner_order_cap=4),
                       f_star=1.031274, x_star=np.array([0.083941, -0.947333]),
                       note="linear objective under a 4x4 matrix inequality")


def _circle_problem():
    x = VariableSpace("x", 2)
    u = VariableSpace("u", 2)
    sp = (x, u)
    x1, x2 = _vars(x, sp)
    u1, u2 = _vars(u, sp)
    one = _c(1.0, sp)
    f = parse_polynomial("- x1 - x2", [x])
    g = x1 * (u1 ** 2 - one) + (x2 - u1 * u2) ** 2
    xx1 = Polynomial.variable(x, 0, (x,))
    xx2 = Polynomial.variable(x, 1, (x,))
    X = SemialgebraicSet(x, equalities=[xx1 ** 2 + xx2 ** 2
                                        - Polynomial.constant(2.0, (x,))])
    U = SemialgebraicSet(u)  # all of R^2
    return SippProblem(name="circle-raw", f=f, g=g, x_space=x, X=X,
                       u_space=u, U=U, u_compact=False)


def _circle_raw() -> CorpusEntry:
    prob = _circle_problem()
    return CorpusEntry("circle-raw", prob,
                       ExchangeOptions(u0=np.array([1.0, -1.0])),
                       expect_status="inner_unattained_suspected",
                       note="unattained inner infimum: the audit must reject "
                            "the spurious certificate")


def _circle_hom() -> CorpusEntry:
    prob = homogenize_problem(_circle_problem())
    prob.name = "circle-hom"
    return CorpusEntry("circle-hom", prob,
                       ExchangeOptions(u0=np.array([1.0, 0.0, 0.0]),
                                       eps=1e-6, k_max=40),
                       f_star=-np.sqrt(2.0), x_star=np.array([0.0, np.sqrt(2.0)]),
                       f_tol=1e-3, x_tol=1e-3,
                       note="compactified index sphere recovers the true optimum")


def _cubic_curve_problem():
    x = VariableSpace("x", 2)
    u = VariableSpace("u", 2)
    sp = (x, u)
    x1, x2 = _vars(x, sp)
    u1, u2 = _vars(u, sp)
    f = parse_polynomial("x1^2 + x2^2", [x])
    g = x1 * u1 + u2 + x2
    uu1 = Polynomial.variable(u, 0, (u,))
    uu2 = Polynomial.variable(u, 1, (u,))
    U = SemialgebraicSet(u, inequalities=[uu1 ** 3 + uu2 ** 3 - 3.0 * uu1 * uu2])
    X = SemialgebraicSet(x, inequalities=[parse_polynomial("4 - x1^2 - x2^2", [x])])
    return SippProblem(name="cubic-curve-raw", f=f, g=g, x_space=x, X=X,
                       u_space=u, U=U, u_compact=False)


def _cubic_curve_raw() -> CorpusEntry:
    prob = _cubic_curve_problem()
    return CorpusEntry("cubic-curve-raw", prob,
                       ExchangeOptions(u0=np.array([1.0, -1.0])),
                       expect_status="inner_unattained_suspected",
                       note="index set with an asymptote: raw run must be rejected")


def _cubic_curve_hom() -> CorpusEntry:
    prob = homogenize_problem(_cubic_curve_problem())
    prob.name = "cubic-curve-hom"
    return CorpusEntry("cubic-curve-hom", prob,
                       ExchangeOptions(u0=np.array([1.0, 0.0, 0.0]), k_max=25),
                       x_star=np.array([1.0, 1.0]),
                       note="homogenized asymptotic index set")


def _lifted_infeasible() -> CorpusEntry:
    x = VariableSpace("x", 1)
    u = VariableSpace("u", 2)
    sp = (x, u)
    (x1,) = _vars(x, sp)
    u1, u2 = _vars(u, sp)
    one = _c(1.0, sp)
    f = parse_polynomial("x1^2", [x])
    g = x1 * (u1 - u2 + one)
    uu1 = Polynomial.variable(u, 0, (u,))
    uu2 = Polynomial.variable(u, 1, (u,))
    U = SemialgebraicSet(u, equalities=[uu1 ** 2 * (uu1 - uu2)
                                        - Polynomial.constant(1.0, (u,))])
    X = SemialgebraicSet(x, inequalities=[parse_polynomial("- x1^2 + 3 x1 - 2", [x])])
    raw = SippProblem(name="lifted-infeasible", f=f, g=g, x_space=x, X=X,
                      u_space=u, U=U, u_compact=False, closed_at_infinity=False)
    prob = homogenize_problem(raw)
    prob.name = "lifted-infeasible"
    s = 1.0 / np.sqrt(2.0)
    return CorpusEntry("lifted-infeasible", prob,
                       ExchangeOptions(u0=np.array([s, s, 0.0])),
                       expect_status="master_infeasible",
                       note="index set not closed at infinity: the lift adds a "
                            "point that kills every feasible x")


_BUILDERS = {
    "sip01": _sip01, "sip02": _sip02, "sip03": _sip03, "sip04": _sip04,
    "sip05": _sip05, "sip06": _sip06, "sip07": _sip07,
    "pmi-3x3": _pmi_3x3, "pmi-4x4": _pmi_4x4,
    "circle-raw": _circle_raw, "circle-hom": _circle_hom,
    "cubic-curve-raw": _cubic_curve_raw, "cubic-curve-hom": _cubic_curve_hom,
    "lifted-infeasible": _lifted_infeasible,
}


def names() -> list[str]:
    return list(_BUILDERS)


def get(name: str) -> CorpusEntry:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown corpus problem {name!r}; "
                       f"choose from {', '.join(_BUILDERS)}") from None
