"""Solve a semi-infinite program with the exchange loop.

A semi-infinite polynomial program (SIPP) constrains the decision vector x
by g(x, u) >= 0 for *every* u in an index set U.  The exchange loop
discretizes: it solves a master problem under finitely many frozen index
points, then solves an inner problem to find the worst-case u at the
master's minimizer, exchanges that u into the list, and repeats until the
worst case is certifiably nonnegative.
"""

import numpy as np

from sipsolve import ExchangeOptions, corpus, exchange_loop

# min 1/3 x1^2 + 1/2 x1 + x2^2 - x2
# s.t. -x1^2 - 2 x1 x2 u^2 + sin(u) >= 0 for all u in [0, 2]
# with sin(u) replaced by its cubic Taylor polynomial u - u^3/6.
entry = corpus.get("sip01")
report = exchange_loop(entry.problem, entry.options)

print(f"status     : {report.status}")
print(f"f*         : {report.f_star:.6f}")
print(f"minimizer  : {np.round(report.minimizers[0], 6)}")
print(f"Obj_2      : {report.obj2:.2e}   (worst-case constraint value)")
print(f"iterations : {report.iterations}")
print()
print("iteration trace:")
for rec in report.trace:
    inner = ", ".join(f"{v:+.2e}" for v in rec.inner_values)
    print(f"  k={rec.k}: master bound {rec.master_bound:+.6f}, "
          f"inner worst-case values [{inner}]")
print()
print("final index list (discretized cuts):")
for u in report.index_points:
    print(f"  u = {np.round(u, 6)}")
