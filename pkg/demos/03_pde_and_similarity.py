"""Direct PDE solve against the self-similar profile.

The PDE is driven by T(t, 0) = sqrt(t) from a cold start. A Dirichlet
problem fixes T at the boundary only; the boundary slope T_x(t, 0) = f'(0)
comes out of the solution. Comparing with the profile started from the
slope the PDE actually selects gives agreement at the level of the
discretisation error, while the profile started from f'(0) = -1 describes a
different solution.

Runs at dx = 1/200 to stay quick (about 2 s).
"""
import numpy as np

from qlheat import (BoundarySpec, Field, Grid1D, PhysParams, cross_validate,
                    gradient_of, integrate_profile, locate_front, solve_quasilinear)

p = PhysParams.from_a_squared(1.0, 0.001)
grid = Grid1D.uniform(8.0, 1 / 200)
times = [0.25, 0.5, 1.0]
report = solve_quasilinear(Field.zeros(grid), BoundarySpec.sqrt_time(1.0), p, 1.0, times)
print(f"{report.steps_taken} steps of dt = {report.dt_used:.3e}")

print("\n    t   x_front   x_front/sqrt(t)")
for t, xf in report.front_trajectory:
    print(f"{t:5.2f} {xf:9.4f} {xf / np.sqrt(t):12.4f}")

C_pde = gradient_of(report.snapshot_at(1.0)).values[0]
print(f"\nboundary slope selected by the PDE: T_x(1, 0) = {C_pde:.6f}")

for label, C in (("f'(0) = -1", -1.0), ("f'(0) from the PDE", C_pde)):
    prof = integrate_profile(1.0, C, p)
    z0 = locate_front(prof).z0
    errs = [cross_validate(report, prof, t) for t in times]
    print(f"{label:>20}: z0 = {z0:.4f}, errors at t={times}: "
          + ", ".join(f"{e:.1e}" for e in errs))
