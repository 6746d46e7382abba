"""The linear heat equation as a baseline.

With a sqrt(t) boundary value the linear problem has a closed-form solution
built from the iterated complementary error function. The explicit scheme
converges to it at second order in dx. Unlike the quasilinear model, the
linear solution is positive everywhere for t > 0: there is no front.
"""
import warnings

import numpy as np

from qlheat import (BoundarySpec, Field, Grid1D, PhysParams, linear_oracle,
                    solve_linear, solve_quasilinear)
from qlheat.errors import DomainTooSmallWarning

p = PhysParams.from_a_squared(1.0, 0.001)
warnings.simplefilter("ignore", DomainTooSmallWarning)

prev = None
print("   dx        sup error   ratio")
for n in (50, 100, 200):
    grid = Grid1D.uniform(8.0, 1 / n)
    r = solve_linear(Field.zeros(grid), BoundarySpec.sqrt_time(1.0), p, 1.0, [1.0])
    sel = grid.x <= 4.0
    err = np.max(np.abs(r.final.values[sel] - linear_oracle(1.0, grid.x[sel], 1.0, p)))
    print(f"1/{n:<5d} {err:12.3e}   {'' if prev is None else f'{prev / err:.3f}'}")
    prev = err

grid = Grid1D.uniform(8.0, 1 / 100)
lin = solve_linear(Field.zeros(grid), BoundarySpec.sqrt_time(1.0), p, 1.0, [1.0]).final
ql = solve_quasilinear(Field.zeros(grid), BoundarySpec.sqrt_time(1.0), p, 1.0, [1.0]).final
print("\n   x     linear      quasilinear")
for x in (0.5, 1.5, 2.5, 3.5, 5.0):
    i = int(round(x * 100))
    print(f"{x:4.1f} {lin.values[i]:11.3e} {ql.values[i]:14.3e}")
