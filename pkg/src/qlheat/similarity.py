"""Self-similar reduction of the quasilinear conduction equation.

With ``z = x / sqrt(t)`` and ``T = sqrt(t) * f(z)`` the PDE collapses to

    2 D_T f'' f'^2 = (f - z f') (f'^2 + a^2),

which is integrated here as an initial-value problem from ``z = 0`` with
``f(0) = B`` and ``f'(0) = C``. The first zero ``z0`` of ``f`` is the heat
front; in physical variables it sits at ``x0 = z0 sqrt(t)`` and moves with
``V0 = z0 / (2 sqrt(t))``.

The equation is singular at ``f' = 0``. Integration therefore stops shortly
after ``f`` turns negative (``f <= -0.1 |B|``). Samples beyond the front are
kept in the profile but flagged through :attr:`SimilarityProfile.past_front`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _dopri
from .errors import (DegenerateSlope, InvalidBoundary, NegativeTime, NoFront,
                     NonpositiveTime, NumericalError, StepSizeCollapse)
from .flux_law import PhysParams

FRONT_TOL = 1e-8
RES_TOL = 1e-6


@dataclass(frozen=True)
class IntegrationOptions:
    rtol: float = 1e-10
    atol: float = 1e-10
    n_output: int = 1001  # uniform samples on [0, z_max]
    max_step: float = np.inf
    stop_fraction: float = 0.1  # stop once f <= -stop_fraction * |B|
    fp_min_factor: float = 1e-12
    max_steps: int = 20_000


def ode_rhs(z, f, fp, p: PhysParams, fp_min=0.0):
    """Second derivative ``f''`` from the similarity ODE.

    Raises DegenerateSlope when ``|fp| <= fp_min``; the right-hand side
    divides by ``fp**2``.
    """
    if not abs(fp) > fp_min:
        raise DegenerateSlope(f"|f'|={abs(fp):.3e} <= {fp_min:.3e} at z={z!r}")
    fp2 = fp * fp
    return (f - z * fp) * (fp2 + p.a * p.a) / (2.0 * p.D_T * fp2)


def ode_residual(z, f, fp, fpp, p: PhysParams):
    """``2 D_T f'' f'^2 - (f - z f')(f'^2 + a^2)``, vectorised."""
    fp2 = fp * fp
    return 2.0 * p.D_T * fpp * fp2 - (f - z * fp) * (fp2 + p.a * p.a)


@dataclass(frozen=True)
class SimilarityProfile:
    """Sampled solution ``f(z)``, ``f'(z)`` of the similarity ODE."""

    z: np.ndarray
    f: np.ndarray
    fp: np.ndarray
    params: PhysParams
    B: float
    C: float
    stop_reason: str = "z_max"  # "z_max" | "f_stop" | "degenerate" | "stalled"
    opts: IntegrationOptions = field(default_factory=IntegrationOptions, repr=False)
    _solution: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        z = self.z
        if not (len(z) == len(self.f) == len(self.fp) and len(z) >= 2):
            raise ValueError("z, f, fp must have equal length >= 2")
        if z[0] != 0.0 or np.any(np.diff(z) <= 0):
            raise ValueError("z must start at 0 and increase strictly")
        for arr in (self.z, self.f, self.fp):
            arr.setflags(write=False)

    @property
    def z_end(self) -> float:
        return float(self.z[-1])

    @property
    def past_front(self) -> np.ndarray:
        """True for samples at or beyond the first sign change of ``f``."""
        nonpos = self.f <= 0
        return np.cumsum(nonpos) > 0

    def __call__(self, z):
        """Dense-output value of ``f`` (scalar or array)."""
        return self._dense(z, 0)

    def derivative(self, z):
        return self._dense(z, 1)

    def _dense(self, z, row):
        zz = np.asarray(z, dtype=float)
        if np.any(zz < 0) or np.any(zz > self.z_end):
            raise ValueError(f"z outside integrated range [0, {self.z_end}]")
        out = self._solution.sol(zz.ravel())[row].reshape(zz.shape)
        return float(out) if out.ndim == 0 else out

    def second_derivative(self):
        """``f''`` at every sample from the derivative of the dense ``f'``."""
        return self._solution.dsol(self.z)[1]

    def temperature(self, t, x):
        """Physical field ``sqrt(t) * f(x / sqrt(t))``."""
        st = math.sqrt(t)
        return st * self(np.asarray(x, dtype=float) / st)

    def residual(self):
        """Pointwise ODE residual at interior samples."""
        fpp = self.second_derivative()
        r = ode_residual(self.z, self.f, self.fp, fpp, self.params)
        return r[1:-1]

    def check_residual(self, res_tol=RES_TOL):
        r = self.residual()
        bound = res_tol * (1.0 + np.abs(self.f[1:-1]))
        bad = np.abs(r) > bound
        if np.any(bad):
            i = int(np.argmax(np.abs(r) / bound))
            raise NumericalError(
                f"similarity ODE residual {r[i]:.3e} exceeds {bound[i]:.3e} "
                f"at z={self.z[i + 1]!r}")


@dataclass(frozen=True)
class FrontInfo:
    z0: float
    bracket: tuple

    def position(self, t):
        return front_position(self, t)

    def velocity(self, t):
        return front_velocity(self, t)


def _fp_min(C, p, opts):
    return opts.fp_min_factor * max(abs(C), p.a)


def _make_rhs(p, fp_min):
    def rhs(z, y):
        return np.array([y[1], ode_rhs(z, y[0], y[1], p, fp_min)])
    return rhs


def integrate_profile(B, C, p: PhysParams, z_max=5.0,
                      opts: IntegrationOptions | None = None) -> SimilarityProfile:
    """Integrate the similarity ODE from ``z = 0`` with ``f = B, f' = C``.

    Stops at ``z_max``, when ``f <= -0.1 |B|`` or when the slope degenerates.
    If the integration stalls after ``f`` has already changed sign, the
    profile ends there with ``stop_reason="stalled"``.
    The returned profile holds the accepted steps merged with a uniform grid
    of ``opts.n_output`` points on ``[0, z_max]`` (truncated at the stop).

    Raises InvalidBoundary for ``C == 0`` and StepSizeCollapse if the step
    size underflows first.
    """
    opts = opts or IntegrationOptions()
    B, C = float(B), float(C)
    if C == 0.0 or not math.isfinite(C):
        raise InvalidBoundary(f"boundary slope C must be finite and nonzero, got {C!r}")
    if not (z_max > 0 and math.isfinite(z_max)):
        raise ValueError(f"z_max must be positive, got {z_max!r}")
    fp_min = _fp_min(C, p, opts)
    f_stop = -opts.stop_fraction * abs(B)

    def stop(z, y):
        return y[0] <= f_stop or abs(y[1]) <= fp_min

    try:
        sol = _dopri.integrate(_make_rhs(p, fp_min), 0.0, [B, C], float(z_max),
                               rtol=opts.rtol, atol=opts.atol, stop=stop,
                               max_step=opts.max_step, max_steps=opts.max_steps)
    except StepSizeCollapse as exc:
        # past a zero crossing the equation can turn violently stiff while f'
        # is tiny; the front is already bracketed, so treat it as a stop
        sol = exc.partial
        if not np.any(sol.y[0] <= 0) or len(sol.z) < 2:
            raise
    z_end = sol.z[-1]
    if sol.status == "collapsed":
        reason = "stalled"
    elif sol.status == "stopped":
        reason = "f_stop" if sol.y[0, -1] <= f_stop else "degenerate"
    elif sol.status == "degenerate":
        reason = "degenerate"
    else:
        reason = "z_max"
    if len(sol.z) < 2:
        raise NumericalError("integration made no progress from z=0")

    grid = np.linspace(0.0, z_max, opts.n_output)
    grid = grid[grid <= z_end]
    z = np.union1d(sol.z, grid)
    # drop near-duplicates produced by rounding of the uniform grid
    keep = np.concatenate([[True], np.diff(z) > 1e-14 * max(1.0, z_end)])
    z = z[keep]
    y = sol.sol(z)
    # accepted states are exact, not interpolated
    step_idx = np.searchsorted(z, sol.z)
    y[:, step_idx] = sol.y
    profile = SimilarityProfile(z=z, f=y[0], fp=y[1], params=p, B=B, C=C,
                                stop_reason=reason, opts=opts, _solution=sol)
    return profile


def locate_front(profile: SimilarityProfile, tol=FRONT_TOL) -> FrontInfo:
    """Bracket the first zero of ``f`` to width ``tol``.

    The coarse bracket comes from the accepted integration steps; it is then
    bisected, each trial point being obtained by integrating afresh from the
    last accepted state with positive ``f``.
    """
    if profile.f[0] <= 0:
        return FrontInfo(z0=0.0, bracket=(0.0, 0.0))
    sol = profile._solution
    f_steps = sol.y[0]
    hits = np.nonzero(f_steps <= 0)[0]
    if hits.size == 0:
        raise NoFront(
            f"f stays positive up to z={profile.z_end!r} "
            f"(stopped by {profile.stop_reason})")
    k = int(hits[0])
    z_start, y_start = sol.z[k - 1], sol.y[:, k - 1]
    lo, hi = float(z_start), float(sol.z[k])
    f_lo, f_hi = float(y_start[0]), float(f_steps[k])

    p, opts = profile.params, profile.opts
    rhs = _make_rhs(p, _fp_min(profile.C, p, opts))

    def f_at(z):
        leg = _dopri.integrate(rhs, z_start, y_start, z, rtol=opts.rtol * 1e-2,
                               atol=opts.atol * 1e-2)
        return float(leg.y[0, -1])

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = f_at(mid)
        if f_mid > 0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    z0 = lo + (hi - lo) * f_lo / (f_lo - f_hi)
    if not lo < z0 < hi:
        z0 = 0.5 * (lo + hi)
    return FrontInfo(z0=float(z0), bracket=(lo, hi))


def front_position(info: FrontInfo, t):
    """Front location ``x0 = z0 sqrt(t)``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise NegativeTime(f"time must be >= 0, got {t!r}")
    x = info.z0 * np.sqrt(t)
    return float(x) if x.ndim == 0 else x


def front_velocity(info: FrontInfo, t):
    """Front speed ``V0 = z0 / (2 sqrt(t))``; finite for every t > 0."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise NonpositiveTime(f"front velocity needs t > 0, got {t!r}")
    v = info.z0 / (2.0 * np.sqrt(t))
    return float(v) if v.ndim == 0 else v
