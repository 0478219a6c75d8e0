"""Optimize under a polynomial matrix inequality (PMI).

G(x) >= 0 (positive semidefiniteness of a symmetric polynomial matrix) is
equivalent to the scalar semi-infinite constraint u^T G(x) u >= 0 for all
u on the unit sphere, so PMI problems reduce to SIPPs.  The characteristic
polynomial gives an independent description of the feasible set: G(x) is
PSD exactly when all its coefficients g_i(x) are nonnegative.
"""

import numpy as np

from sipsolve import (PolynomialMatrix, VariableSpace, char_poly, corpus,
                      exchange_loop, parse_polynomial, poly_to_string)

x = VariableSpace("x", 2)
P = lambda s: parse_polynomial(s, [x])

G = PolynomialMatrix(3, {
    (0, 0): P("4 - x1^2 - x2^2"), (0, 1): P("x1"), (0, 2): P("x2"),
    (1, 1): P("x2^2 - x1"), (1, 2): P("x1 x2"),
    (2, 2): P("x1^2 - x2")})

print("characteristic polynomial det(t I - G(x)) coefficients:")
for i, g in enumerate(char_poly(G), start=1):
    s = poly_to_string(g)
    print(f"  g{i} = {s if len(s) < 70 else s[:67] + '...'}")

entry = corpus.get("pmi-3x3")
report = exchange_loop(entry.problem, entry.options)
print()
print(f"min x1 + x2 s.t. G(x) >= 0:")
print(f"  status    : {report.status}")
print(f"  minimizer : {np.round(report.minimizers[0], 4)}")
print(f"  Obj_2     : {report.obj2:.2e}")

# cross-check: the minimizer sits on the boundary of the PSD region
xs = report.minimizers[0]
lam = np.linalg.eigvalsh(G.value_at({"x": xs})).min()
print(f"  smallest eigenvalue of G at the minimizer: {lam:+.2e}")
