"""Polynomial matrix inequality front-end.

``G(x) >= 0`` for a symmetric polynomial matrix G is the same as
``u' G(x) u >= 0`` for all unit vectors u, which is a semi-infinite
constraint over the compact sphere: exactly the shape the exchange loop
consumes.  Characteristic-polynomial coefficients are provided as a
validation and plotting aid for the feasibility region (sign conditions on
them describe PSD-ness, by Descartes' rule applied to the spectrum).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .homogenize import sphere_equality
from .poly import Polynomial, PolynomialError, SemialgebraicSet, VariableSpace


@dataclass
class PolynomialMatrix:
    """Symmetric m x m matrix with polynomial entries over the decision space."""

    size: int
    entries: dict[tuple[int, int], Polynomial]

    def __post_init__(self):
        sym = {}
        for (i, j), p in self.entries.items():
            if not (0 <= i < self.size and 0 <= j < self.size):
                raise PolynomialError("entry index out of range")
            key = (min(i, j), max(i, j))
            if key in sym and sym[key] != p:
                raise PolynomialError(f"asymmetric entries at {key}")
            sym[key] = p
        self.entries = sym

    def entry(self, i: int, j: int) -> Polynomial | None:
        return self.entries.get((min(i, j), max(i, j)))

    def value_at(self, point: dict) -> np.ndarray:
        M = np.zeros((self.size, self.size))
        for (i, j), p in self.entries.items():
            v = p(point)
            M[i, j] = v
            if i != j:
                M[j, i] = v
        return M


def pmi_to_sipp(f: Polynomial, G: PolynomialMatrix, X_extra: SemialgebraicSet | None = None,
                name: str = "pmi", u_name: str = "u"):
    """Reformulate ``min f s.t. G(x) >= 0`` as a SIPP over the unit sphere.

    The caller must ensure the feasible set is compact (adding bounds to
    ``X_extra`` as needed); the sphere makes the index set compact by
    construction.
    """
    from .exchange import SippProblem

    u = VariableSpace(u_name, G.size)
    if X_extra is None:
        if not f.spaces:
            raise PolynomialError("cannot infer the decision space")
        X_extra = SemialgebraicSet(f.spaces[0])
    x = X_extra.space
    spaces = (x, u)
    g = Polynomial.zero(spaces)
    for (i, j), p in G.entries.items():
        ui = Polynomial.variable(u, i, (u,))
        uj = Polynomial.variable(u, j, (u,))
        factor = ui * uj if i == j else 2.0 * (ui * uj)
        g = g + p.in_spaces(spaces) * factor.in_spaces(spaces)
    U = SemialgebraicSet(u, equalities=[sphere_equality(u)])
    return SippProblem(name=name, f=f, g=g, x_space=x, u_space=u,
                       X=X_extra, U=U, u_compact=True, x_compact=True,
                       closed_at_infinity=True)


def char_poly(G: PolynomialMatrix, max_size: int = 6) -> list[Polynomial]:
    """Signed characteristic coefficients g_1..g_m of det(t I - G(x)).

    With p(t, x) = t^m - g_1 t^{m-1} + g_2 t^{m-2} - ..., all eigenvalues of
    G(x) are nonnegative exactly when every g_i(x) >= 0.  Computed by the
    Faddeev-LeVerrier recurrence over the polynomial ring.
    """
    m = G.size
    if m > max_size:
        raise PolynomialError(f"matrix size {m} exceeds the cost guard {max_size}")
    spaces = None
    for p in G.entries.values():
        spaces = p.spaces
        break
    if spaces is None:
        raise PolynomialError("empty polynomial matrix")
    zero = Polynomial.zero(spaces)
    one = Polynomial.constant(1.0, spaces)

    def mat_entry(i, j):
        p = G.entry(i, j)
        return p.in_spaces(spaces) if p is not None else zero

    A = [[mat_entry(i, j) for j in range(m)] for i in range(m)]

    def mat_mul(X, Y):
        return [[sum((X[i][k] * Y[k][j] for k in range(m)), zero)
                 for j in range(m)] for i in range(m)]

    def mat_add_diag(X, c):
        return [[X[i][j] + (c if i == j else zero) for j in range(m)] for i in range(m)]

    def trace(X):
        return sum((X[i][i] for i in range(m)), zero)

    # char poly of A: t^m + a_1 t^{m-1} + ... + a_m, a_k from the recurrence
    coeffs = []
    Mk = [[one if i == j else zero for j in range(m)] for i in range(m)]  # M_1 = I
    AM = A
    for k in range(1, m + 1):
        AM = mat_mul(A, Mk) if k > 1 else A
        a_k = trace(AM) * (-1.0 / k)
        coeffs.append(a_k)
        Mk = mat_add_diag(AM, a_k)
    # g_i = (-1)^i a_i gives p(t) = t^m - g_1 t^{m-1} + g_2 t^{m-2} - ...
    return [((-1.0) ** (i + 1)) * a for i, a in enumerate(coeffs)]


def feasibility_grid(G: PolynomialMatrix, box: tuple[float, float],
                     resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Sample the char-poly sign conditions on a 2-D grid; CSV-ready output.

    Returns (points, feasible_flags) where a flag is 1 when all g_i >= 0.
    Only supported for 2-dimensional decision spaces.
    """
    gs = char_poly(G)
    space = gs[0].spaces[0]
    if space.dim != 2:
        raise PolynomialError("feasibility grid only supported for n = 2")
    lo, hi = box
    axis = np.linspace(lo, hi, resolution)
    pts, flags = [], []
    for a in axis:
        for b in axis:
            pt = {space.name: [a, b]}
            ok = all(g(pt) >= -1e-9 for g in gs)
            pts.append((a, b))
            flags.append(1 if ok else 0)
    return np.array(pts), np.array(flags)
