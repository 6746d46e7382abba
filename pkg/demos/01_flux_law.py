"""Modified flux law versus Fourier's law.

The modified flux lags the linear one by lam * a * arctan(g / a). The lag
saturates at lam * a * pi / 2, so for steep gradients the two laws agree in
relative terms, while near g = 0 the flux (and the effective diffusivity)
vanishes faster than linearly.
"""
import math

import numpy as np

from qlheat import (PhysParams, effective_diffusivity, flux_gap, linear_flux,
                    modified_flux)

p = PhysParams.from_a_squared(1.0, 0.001)
print(f"a = {p.a:.6f}, saturation gap lam*a*pi/2 = {p.lam * p.a * math.pi / 2:.6f}\n")

print(f"{'g/a':>8} {'J_linear':>12} {'J_modified':>12} {'gap':>10} {'gap/|J|':>10} {'D_eff':>10}")
for r in 10.0 ** np.arange(-3, 7):
    g = r * p.a
    jl, jm, gap = linear_flux(g, p), modified_flux(g, p), flux_gap(g, p)
    print(f"{r:8.0e} {jl:12.4e} {jm:12.4e} {gap:10.3e} {gap / abs(jl):10.3e} "
          f"{effective_diffusivity(g, p):10.3e}")

# the relative gap is arctan(r)/r: it tends to 1 for small gradients and
# decays like pi/(2r) for large ones
r = 1e5
print(f"\nrelative gap at g = 1e5 a: {flux_gap(r * p.a, p) / (r * p.a):.4e} "
      f"(pi/2 * 1e-5 = {math.pi / 2 * 1e-5:.4e})")
