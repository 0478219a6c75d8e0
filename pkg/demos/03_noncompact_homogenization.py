"""Noncompact index sets: why homogenization is needed, and how it works.

With U = R^2 the inner problem min_u g(x, u) may not attain its infimum,
so the exchange loop can stall or accept a wrong answer.  Homogenizing
lifts u to (u0, u) on the unit sphere -- a compact set -- in a way that
preserves nonnegativity of g whenever the original index set is closed at
infinity.

Here: min -x1 - x2 on the circle x1^2 + x2^2 = 2, subject to
x1 (u1^2 - 1) + (x2 - u1 u2)^2 >= 0 for all u in R^2.  The constraint
forces x1 <= 0 only in the limit |u| -> inf, so the raw run cannot see it;
the homogenized run converges to the true optimum (0, sqrt(2)).
"""

import numpy as np

from sipsolve import corpus, exchange_loop

print("raw run (index set R^2, not compact):")
raw = corpus.get("circle-raw")
rep = exchange_loop(raw.problem, raw.options)
print(f"  status: {rep.status}")
print(f"  detail: {rep.detail}")

print()
print("homogenized run (index set lifted to the unit sphere):")
hom = corpus.get("circle-hom")
rep = exchange_loop(hom.problem, hom.options)
print(f"  status    : {rep.status}")
print(f"  f*        : {rep.f_star:.6f}   (true optimum -sqrt(2) ="
      f" {-np.sqrt(2):.6f})")
print(f"  minimizer : {np.round(rep.minimizers[0], 5)}   (true: (0, sqrt(2)))")
print(f"  iterations: {rep.iterations}")
