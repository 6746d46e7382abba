"""Point symmetries checked on a computed solution.

The equation is invariant under shifts of t, x and T and under the
dilatation (t, x, T) -> (e^{2 eps} t, e^{eps} x, e^{eps} T). Mapping a
numerical solution through one of these and re-evaluating the discrete
residual should give numbers of the same size as the solution's own
residual; rescaling time alone is not a symmetry and is flagged at once.
"""
from dataclasses import replace

import numpy as np

from qlheat import (BoundarySpec, Field, GroupElement, Grid1D, PhysParams,
                    solve_quasilinear, symmetry_residual)
from qlheat.pde_solver import SolveReport

p = PhysParams.from_a_squared(1.0, 0.001)
grid = Grid1D.uniform(8.0, 1 / 200)
report = solve_quasilinear(Field.zeros(grid), BoundarySpec.sqrt_time(1.0), p, 1.0,
                           np.linspace(0.5, 1.0, 51))

base = symmetry_residual(GroupElement.identity(), report, p)
print(f"identity residual: {base:.3e}")
for name, g in [("time shift", GroupElement(tau=0.005)),
                ("space shift", GroupElement(xi=0.25)),
                ("T shift", GroupElement(theta=2.0)),
                ("dilatation", GroupElement(eps=0.1)),
                ("all four", GroupElement(0.005, 0.25, 2.0, 0.1))]:
    r = symmetry_residual(g, report, p)
    print(f"{name:>12}: {r:.3e}  ({r / base:.2f} x identity)")

snaps = [replace(s, t=2 * s.t) for s in report.snapshots]
fake = SolveReport(snaps[-1], snaps, [], 0, 0.0)
r = symmetry_residual(GroupElement.identity(), fake, p)
print(f"\ntime relabelled t -> 2t: {r:.3e}  ({r / base:.0f} x identity)")
