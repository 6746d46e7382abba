"""The equation for the gradient H = T_x in conservation form.

Differentiating the conduction equation in x gives H_t = (D_eff(H) H_x)_x.
Solved with a finite-volume scheme it conserves sum(H) dx up to the boundary
fluxes; driving it with the flux T_t(t, 0) = B / (2 sqrt(t)) reproduces the
gradient of the temperature solution.
"""
import math

import numpy as np

from qlheat import (BoundarySpec, Field, GradientBC, Grid1D, PhysParams,
                    gradient_of, solve_gradient_form, solve_quasilinear)
from qlheat.pde_solver import max_stable_dt

p = PhysParams.from_a_squared(1.0, 0.001)
grid = Grid1D.uniform(8.0, 1 / 200)
T = solve_quasilinear(Field.zeros(grid), BoundarySpec.sqrt_time(1.0), p, 1.0, [1.0]).final
H = solve_gradient_form(Field.zeros(grid), p, 1.0, [1.0],
                        bc=GradientBC.for_sqrt_time(1.0)).final
HT = gradient_of(T).values
print(f"max |H - T_x| / max |T_x| at t=1: "
      f"{np.max(np.abs(H.values - HT)) / np.max(np.abs(HT)):.2e}")
print(f"sum(H) dx = {math.fsum(H.values) * grid.dx:.6f}, "
      f"T(1,L) - T(1,0) = {T.values[-1] - T.values[0]:.6f}")

small = Grid1D.uniform(1.0, 0.01)
x = small.x
H0 = np.exp(-((x - 0.5) / 0.1) ** 2)
dt = max_stable_dt(small.dx, p)
out = solve_gradient_form(Field(small, 0.0, H0), p, 1e4 * dt, [1e4 * dt]).final
s0, s1 = math.fsum(H0), math.fsum(out.values)
print(f"zero-flux run, 10^4 steps: relative drift of sum(H) dx = {abs(s1 - s0) / s0:.1e}")
