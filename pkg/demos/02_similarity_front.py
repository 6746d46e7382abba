"""Self-similar profile and the heat front.

With z = x / sqrt(t) and T = sqrt(t) f(z) the conduction equation becomes an
ODE in z. Integrating it from f(0) = 1, f'(0) = -1 gives a profile that
reaches zero at a finite z0; in physical variables the front sits at
z0 sqrt(t) and moves with the finite speed z0 / (2 sqrt(t)).
"""
import numpy as np

from qlheat import PhysParams, integrate_profile, locate_front

p = PhysParams.from_a_squared(1.0, 0.001)
profile = integrate_profile(1.0, -1.0, p, z_max=5.0)
front = locate_front(profile)
print(f"stopped by: {profile.stop_reason} at z = {profile.z_end:.4f}")
print(f"z0 = {front.z0:.10f}, bracket width {front.bracket[1] - front.bracket[0]:.1e}")
profile.check_residual()
print(f"max ODE residual on the samples: {np.max(np.abs(profile.residual())):.1e}\n")

for z in (0.0, 0.5, 1.0, 1.5, front.z0):
    print(f"  f({z:.4f}) = {profile(z): .6f}   f' = {profile.derivative(z): .6f}")

print("\n     t     x0(t)     V0(t)")
for t in (0.25, 1.0, 4.0, 16.0):
    print(f"{t:6.2f} {front.position(t):9.4f} {front.velocity(t):9.4f}")

# smaller a means a sharper switch-off of the diffusivity at the front
print("\n  a^2        z0")
for a2 in (1e-2, 1e-3, 1e-4, 1e-6):
    z0 = locate_front(integrate_profile(1.0, -1.0, PhysParams.from_a_squared(1.0, a2))).z0
    print(f"{a2:6.0e} {z0:10.6f}")
