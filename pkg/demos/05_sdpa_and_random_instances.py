"""SDPA file round trips and randomly generated instances.

Every relaxation the solver assembles can be exported in the SDPA sparse
format for cross-checking against external semidefinite solvers, and
re-imported losslessly.  The instance generator draws random coupled
problems (Gaussian objective, concave coupling constraint) for stress
testing at chosen sizes.
"""

import tempfile
from pathlib import Path

from sipsolve import (RandomInstanceSpec, RelaxationProblem, build_moment_sdp,
                      default_backend, exchange_loop, export_sdpa,
                      generate_random_instance, import_sdpa, render_problem)

spec = RandomInstanceSpec(n=3, p=2, d1=1, d2=2, uset="ball", seed=42)
problem = generate_random_instance(spec)
print(f"generated instance {problem.name}:")
print(render_problem(problem))

report = exchange_loop(problem)
print(f"solve: {report.status}, f* = {report.f_star:.6f}, "
      f"Obj_2 = {report.obj2:.2e}, {report.iterations} iterations")

# export the order-2 relaxation of the objective over X and re-solve it
prog = build_moment_sdp(RelaxationProblem(problem.f, problem.X, 2))
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "relaxation.dat-s"
    export_sdpa(prog, str(path), comment="order-2 moment relaxation")
    print(f"\nSDPA export ({path.name}, first 5 lines):")
    for line in path.read_text().splitlines()[:5]:
        print(f"  {line}")
    backend = default_backend()
    direct = backend.solve(prog).objective
    roundtrip = backend.solve(import_sdpa(str(path))).objective
    print(f"\nobjective, direct     : {direct:.10f}")
    print(f"objective, round trip : {roundtrip:.10f}")
