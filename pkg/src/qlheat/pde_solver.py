"""Explicit finite-difference solvers on a uniform 1-D grid.

Three equations share the same forward-Euler / central-space machinery:

* the quasilinear equation ``T_t = D_eff(T_x) T_xx`` with
  ``D_eff(g) = D_T g^2 / (g^2 + a^2)``,
* the linear heat equation ``T_t = D_T T_xx`` as a baseline,
* the equation for ``H = T_x`` in conservation form,
  ``H_t = (D_eff(H) H_x)_x``.

Since ``0 <= D_eff <= D_T`` a single stability bound
``dt <= cfl_safety * dx^2 / (2 D_T)`` covers all three, independently of the
solution. The steppers are pure functions; the solve loops reuse buffers but
go through the exact same kernels, so with time-independent boundary data a
solve is bitwise equal to repeated calls of the corresponding stepper.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import CflViolation, DomainTooSmallWarning, NonFiniteState
from .flux_law import PhysParams

CFL_SAFETY = 0.5
FRONT_REL_THRESHOLD = 1e-8
FINITE_CHECK_EVERY = 2000


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid ``x_i = x0 + i * dx`` for ``i = 0 .. n-1``."""

    dx: float
    n: int
    x0: float = 0.0

    def __post_init__(self):
        if not (self.dx > 0 and math.isfinite(self.dx)):
            raise ValueError(f"dx must be positive, got {self.dx!r}")
        if self.n < 3:
            raise ValueError(f"need at least 3 nodes, got {self.n}")

    @classmethod
    def uniform(cls, x_max, dx, x0=0.0) -> "Grid1D":
        n = int(round((x_max - x0) / dx)) + 1
        return cls(dx=dx, n=n, x0=x0)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + np.arange(self.n) * self.dx

    @property
    def x_max(self) -> float:
        return self.x0 + (self.n - 1) * self.dx


@dataclass(frozen=True)
class Field:
    """Samples of T (or of H = T_x) on ``grid`` at time ``t``."""

    grid: Grid1D
    t: float
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NonFiniteState(f"non-finite field values at t={self.t!r}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, grid: Grid1D, t=0.0) -> "Field":
        return cls(grid, t, np.zeros(grid.n))

    @property
    def x(self) -> np.ndarray:
        return self.grid.x


class SqrtTime:
    """Boundary value ``B * sqrt(t)``."""

    def __init__(self, B):
        self.B = float(B)

    def __call__(self, t):
        return self.B * math.sqrt(t)

    def __repr__(self):
        return f"SqrtTime(B={self.B!r})"


class Constant:
    def __init__(self, value):
        self.value = float(value)

    def __call__(self, t):
        return self.value

    def __repr__(self):
        return f"Constant({self.value!r})"


@dataclass(frozen=True)
class BoundarySpec:
    """Dirichlet data: ``left(t)`` at the first node, ``right`` at the last."""

    left: Callable[[float], float]
    right: float = 0.0

    @classmethod
    def sqrt_time(cls, B, right=0.0) -> "BoundarySpec":
        return cls(SqrtTime(B), right)

    @classmethod
    def constant(cls, left, right=0.0) -> "BoundarySpec":
        return cls(Constant(left), right)


def _as_callable(v):
    return v if callable(v) else Constant(v)


@dataclass(frozen=True)
class GradientBC:
    """Boundary treatment for the gradient-form equation.

    ``kind="flux"`` prescribes the face fluxes ``D_eff(H) H_x`` at both outer
    cell faces (``"zero-flux"`` is the special case of zero flux). With
    ``kind="dirichlet"`` the end nodes are set to ``left``/``right``. Values
    may be numbers or callables of time.
    """

    kind: str = "zero-flux"
    left: object = 0.0
    right: object = 0.0

    def __post_init__(self):
        if self.kind not in ("zero-flux", "flux", "dirichlet"):
            raise ValueError(f"unknown gradient boundary kind {self.kind!r}")

    @classmethod
    def for_sqrt_time(cls, B) -> "GradientBC":
        """Flux condition equivalent to ``T(t, 0) = B sqrt(t)``.

        At ``x = 0`` the flux of H equals ``T_t = B / (2 sqrt(t))``.
        """
        return cls("flux", left=lambda t: B / (2.0 * math.sqrt(t)), right=0.0)


@dataclass
class SolveReport:
    final: Field
    snapshots: list
    front_trajectory: list  # (t, x_front) pairs, one per snapshot
    steps_taken: int
    dt_used: float

    def snapshot_at(self, t, rtol=1e-12) -> Field:
        from .errors import MissingSnapshot
        for s in self.snapshots:
            if abs(s.t - t) <= rtol * max(1.0, abs(t)):
                return s
        raise MissingSnapshot(f"no snapshot at t={t!r}")

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])


class Regime(str, enum.Enum):
    DIFFUSIVE = "Diffusive"
    FROZEN = "Frozen"
    TRANSITIONAL = "Transitional"


def max_stable_dt(dx, p: PhysParams, cfl_safety=CFL_SAFETY) -> float:
    return cfl_safety * dx * dx / (2.0 * p.D_T)


def _check_cfl(dt, dx, p, cfl_safety):
    limit = max_stable_dt(dx, p, cfl_safety)
    if not (dt > 0 and dt <= limit * (1 + 1e-12)):
        raise CflViolation(
            f"dt={dt!r} outside (0, {limit!r}] for dx={dx!r}, D_T={p.D_T!r}")


# -- kernels ---------------------------------------------------------------
# Each kernel updates ``new[1:m]`` (or ``new[0:m]``) from ``T`` and leaves
# boundary handling to the caller.

def _kernel_temperature(T, new, dt, dx, p, linear, m):
    """Forward-Euler update of interior nodes ``1 .. m-1``."""
    right, mid, left = T[2:m + 1], T[1:m], T[:m - 1]
    lap = (right - 2.0 * mid + left) / (dx * dx)
    if linear:
        new[1:m] = mid + dt * p.D_T * lap
    else:
        g = (right - left) / (2.0 * dx)
        g2 = g * g
        new[1:m] = mid + dt * (p.D_T * g2 / (g2 + p.a * p.a)) * lap


def _face_fluxes(H, dx, p):
    h = 0.5 * (H[1:] + H[:-1])
    h2 = h * h
    return (p.D_T * h2 / (h2 + p.a * p.a)) * ((H[1:] - H[:-1]) / dx)


def _kernel_gradient(H, dt, dx, p, bc: GradientBC, t_new):
    n = H.size
    F = np.empty(n + 1)
    F[1:n] = _face_fluxes(H, dx, p)
    if bc.kind == "dirichlet":
        new = H.copy()
        new[1:-1] = H[1:-1] + (dt / dx) * (F[2:n] - F[1:n - 1])
        new[0] = _as_callable(bc.left)(t_new)
        new[-1] = _as_callable(bc.right)(t_new)
        return new
    if bc.kind == "zero-flux":
        F[0] = F[n] = 0.0
    else:
        F[0] = _as_callable(bc.left)(t_new)
        F[n] = _as_callable(bc.right)(t_new)
    return H + (dt / dx) * (F[1:] - F[:-1])


# -- public steppers -------------------------------------------------------

def _step_temperature(field_, dt, bc, p, cfl_safety, linear):
    grid = field_.grid
    _check_cfl(dt, grid.dx, p, cfl_safety)
    T = field_.values
    new = np.array(T)
    _kernel_temperature(T, new, dt, grid.dx, p, linear, grid.n - 1)
    t_new = field_.t + dt
    new[0] = bc.left(t_new)
    new[-1] = bc.right
    return Field(grid, t_new, new)


def step_quasilinear(field: Field, dt, bc: BoundarySpec, p: PhysParams,
                     cfl_safety=CFL_SAFETY) -> Field:
    """One explicit step of the quasilinear equation.

    The diffusivity is evaluated from the central-difference gradient at the
    old time level. Boundary nodes take their values at ``t + dt``.
    Raises CflViolation if ``dt`` exceeds the stability bound.
    """
    return _step_temperature(field, dt, bc, p, cfl_safety, linear=False)


def step_linear(field: Field, dt, bc: BoundarySpec, p: PhysParams,
                cfl_safety=CFL_SAFETY) -> Field:
    return _step_temperature(field, dt, bc, p, cfl_safety, linear=True)


def step_gradient_form(hfield: Field, dt, p: PhysParams,
                       bc: GradientBC = GradientBC(),
                       cfl_safety=CFL_SAFETY) -> Field:
    """One conservative step for ``H = T_x``.

    Face fluxes are ``D_eff(H_face) (H_{i+1} - H_i) / dx`` with ``H_face`` the
    arithmetic mean of the two neighbours. Grid nodes act as cell centres,
    so with zero-flux boundaries ``sum(H) * dx`` is conserved.
    """
    grid = hfield.grid
    _check_cfl(dt, grid.dx, p, cfl_safety)
    t_new = hfield.t + dt
    new = _kernel_gradient(hfield.values, dt, grid.dx, p, bc, t_new)
    return Field(grid, t_new, new)


def gradient_of(field: Field) -> Field:
    """Second-order finite-difference ``dT/dx`` on the same grid."""
    v = field.values
    dx = field.grid.dx
    g = np.empty_like(v)
    g[1:-1] = (v[2:] - v[:-2]) / (2.0 * dx)
    # one-sided second-order stencils, written with differences so that
    # constant data gives exactly zero
    g[0] = (4.0 * (v[1] - v[0]) - (v[2] - v[0])) / (2.0 * dx)
    g[-1] = (4.0 * (v[-1] - v[-2]) - (v[-1] - v[-3])) / (2.0 * dx)
    return Field(field.grid, field.t, g)


def classify_regime(g, p: PhysParams, ratio=10.0) -> Regime:
    """Tag a gradient as diffusive (``g^2 >= ratio a^2``), frozen
    (``g^2 <= a^2 / ratio``) or transitional."""
    if not ratio > 1:
        raise ValueError(f"ratio must be > 1, got {ratio!r}")
    g2 = float(g) ** 2
    a2 = p.a * p.a
    if g2 >= ratio * a2:
        return Regime.DIFFUSIVE
    if g2 <= a2 / ratio:
        return Regime.FROZEN
    return Regime.TRANSITIONAL


# -- solve loops -----------------------------------------------------------

def _time_plan(t0, t_end, out_times, dt_max):
    """Yield (target, n_steps, dt, is_output) legs landing on each output."""
    outs = sorted(set(float(t) for t in out_times))
    for t in outs:
        if not (t0 < t <= t_end):
            raise ValueError(f"output time {t!r} outside ({t0!r}, {t_end!r}]")
    targets = outs if outs and outs[-1] == t_end else outs + [float(t_end)]
    prev = t0
    for target in targets:
        span = target - prev
        n = max(1, math.ceil(span / dt_max * (1 - 1e-12)))
        yield prev, target, n, span / n, target in outs
        prev = target


def _front_location(values, x, threshold):
    idx = np.nonzero(values > threshold)[0]
    return float(x[idx[-1]]) if idx.size else float(x[0])


def _front_threshold(init, bc, t_end):
    scale = max(abs(bc.left(t_end)), abs(bc.right),
                float(np.max(np.abs(init.values))))
    return FRONT_REL_THRESHOLD * scale


def _check_finite(values, t):
    if not np.all(np.isfinite(values)):
        raise NonFiniteState(f"solution became non-finite by t={t!r}")


def _solve_temperature(init, bc, p, t_end, out_times, cfl_safety, linear):
    if not t_end > init.t:
        raise ValueError(f"t_end={t_end!r} must exceed initial time {init.t!r}")
    grid = init.grid
    dx, n = grid.dx, grid.n
    x = grid.x
    dt_max = max_stable_dt(dx, p, cfl_safety)
    threshold = _front_threshold(init, bc, t_end)

    T = np.array(init.values)
    new = T.copy()
    tail = bc.right
    # nodes beyond ``last`` all hold the right-boundary value, so their
    # gradient and Laplacian vanish and the update is exactly zero there
    diff = np.nonzero(T != tail)[0]
    last = int(diff[-1]) if diff.size else 0
    snapshots, trajectory = [], []
    steps, dt_used = 0, 0.0
    for t_prev, target, nsteps, dt, is_output in _time_plan(init.t, t_end,
                                                            out_times, dt_max):
        _check_cfl(dt, dx, p, cfl_safety)
        dt_used = max(dt_used, dt)
        for k in range(1, nsteps + 1):
            t_new = target if k == nsteps else t_prev + k * dt
            m = min(last + 2, n - 1)
            _kernel_temperature(T, new, dt, dx, p, linear, m)
            new[0] = bc.left(t_new)
            new[-1] = tail
            T, new = new, T
            if m > last and T[m - 1] != tail:
                last = m - 1
            last = max(last, 1)
            steps += 1
            if steps % FINITE_CHECK_EVERY == 0:
                _check_finite(T[:m + 1], t_new)
        _check_finite(T, target)
        if is_output:
            snap = Field(grid, target, T.copy())
            snapshots.append(snap)
            trajectory.append((target, _front_location(T, x, threshold)))
    final = snapshots[-1] if snapshots and snapshots[-1].t == t_end else Field(
        grid, t_end, T.copy())
    if trajectory:
        x_front = max(xf for _, xf in trajectory)
        if x_front >= grid.x0 + 0.9 * (grid.x_max - grid.x0):
            warnings.warn(
                f"front reached x={x_front!r}, within 10% of x_max={grid.x_max!r}",
                DomainTooSmallWarning, stacklevel=3)
    return SolveReport(final, snapshots, trajectory, steps, dt_used)


def solve_quasilinear(init: Field, bc: BoundarySpec, p: PhysParams, t_end,
                      out_times: Sequence[float] = (),
                      cfl_safety=CFL_SAFETY) -> SolveReport:
    """March the quasilinear equation from ``init`` to ``t_end``.

    The step is the largest stable one that lands exactly on every output
    time. For each snapshot the front is recorded as the largest ``x`` with
    ``T`` above ``1e-8`` times the boundary scale.
    """
    return _solve_temperature(init, bc, p, t_end, out_times, cfl_safety,
                              linear=False)


def solve_linear(init: Field, bc: BoundarySpec, p: PhysParams, t_end,
                 out_times: Sequence[float] = (),
                 cfl_safety=CFL_SAFETY) -> SolveReport:
    """Same scheme as :func:`solve_quasilinear` with diffusivity fixed at D_T."""
    return _solve_temperature(init, bc, p, t_end, out_times, cfl_safety,
                              linear=True)


def solve_gradient_form(init: Field, p: PhysParams, t_end,
                        out_times: Sequence[float] = (),
                        bc: GradientBC = GradientBC(),
                        cfl_safety=CFL_SAFETY) -> SolveReport:
    """Evolve ``H`` with :func:`step_gradient_form` up to ``t_end``.

    The front of a gradient field is the largest ``x`` with ``|H|`` above
    ``1e-8 max|H|`` of the final state.
    """
    if not t_end > init.t:
        raise ValueError(f"t_end={t_end!r} must exceed initial time {init.t!r}")
    grid = init.grid
    x = grid.x
    dt_max = max_stable_dt(grid.dx, p, cfl_safety)
    H = np.array(init.values)
    snapshots, steps, dt_used = [], 0, 0.0
    for t_prev, target, nsteps, dt, is_output in _time_plan(init.t, t_end,
                                                            out_times, dt_max):
        _check_cfl(dt, grid.dx, p, cfl_safety)
        dt_used = max(dt_used, dt)
        for k in range(1, nsteps + 1):
            t_new = target if k == nsteps else t_prev + k * dt
            H = _kernel_gradient(H, dt, grid.dx, p, bc, t_new)
            steps += 1
            if steps % FINITE_CHECK_EVERY == 0:
                _check_finite(H, t_new)
        _check_finite(H, target)
        if is_output:
            snapshots.append(Field(grid, target, H.copy()))
    final = snapshots[-1] if snapshots and snapshots[-1].t == t_end else Field(
        grid, t_end, H.copy())
    threshold = FRONT_REL_THRESHOLD * float(np.max(np.abs(final.values)))
    trajectory = [(s.t, _front_location(np.abs(s.values), x, threshold))
                  for s in snapshots]
    return SolveReport(final, snapshots, trajectory, steps, dt_used)
