"""Dormand-Prince 5(4) embedded pair with a quartic continuous extension.

Minimal integrator for small autonomous-size systems: local extrapolation
(5th order solution is propagated), FSAL, PI-free classic step control and a
dense output that is also differentiable in the independent variable.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSlope, StepSizeCollapse

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# difference between 5th and 4th order weights, FSAL stage included
E = np.array([
    71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
])
# y(z0 + s*h) = y0 + h * K.T @ P @ [s, s^2, s^3, s^4]
P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608,
     -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933,
     87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304,
     -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408,
     701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883,
     -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423,
     69997945 / 29380423],
])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


@dataclass
class Segment:
    """Dense-output polynomial valid on ``[z0, z0 + h]``."""

    z0: float
    h: float
    y0: np.ndarray
    Q: np.ndarray  # (n_state, 4) = K.T @ P

    def __call__(self, z):
        s = (np.asarray(z, dtype=float) - self.z0) / self.h
        powers = np.stack([s, s**2, s**3, s**4])
        return self.y0[:, None] + self.h * (self.Q @ powers.reshape(4, -1))

    def derivative(self, z):
        s = (np.asarray(z, dtype=float) - self.z0) / self.h
        powers = np.stack([np.ones_like(s), 2 * s, 3 * s**2, 4 * s**3])
        return self.Q @ powers.reshape(4, -1)


@dataclass
class Solution:
    z: np.ndarray
    y: np.ndarray  # (n_state, n_steps + 1)
    segments: list = field(repr=False)
    status: str = "complete"  # "complete" | "stopped" | "degenerate"

    def _locate(self, z):
        idx = np.searchsorted(self.z, z, side="right") - 1
        return np.clip(idx, 0, len(self.segments) - 1)

    def sol(self, z):
        """Dense output, shape (n_state, len(z))."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        out = np.empty((self.y.shape[0], z.size))
        idx = self._locate(z)
        for k in np.unique(idx):
            mask = idx == k
            out[:, mask] = self.segments[k](z[mask])
        return out

    def dsol(self, z):
        """Derivative of the dense output with respect to ``z``."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        out = np.empty((self.y.shape[0], z.size))
        idx = self._locate(z)
        for k in np.unique(idx):
            mask = idx == k
            out[:, mask] = self.segments[k].derivative(z[mask])
        return out


def _rms_norm(x):
    return np.sqrt(np.mean(x * x))


def _initial_step(fun, z0, y0, f0, rtol, atol):
    scale = atol + np.abs(y0) * rtol
    d0 = _rms_norm(y0 / scale)
    d1 = _rms_norm(f0 / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    try:
        f1 = fun(z0 + h0, y0 + h0 * f0)
        d2 = _rms_norm((f1 - f0) / scale) / h0
    except DegenerateSlope:
        return h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def integrate(fun, z0, y0, z_end, *, rtol=1e-10, atol=1e-10, stop=None,
              first_step=None, max_step=np.inf, max_steps=100_000):
    """Integrate ``y' = fun(z, y)`` from ``z0`` to ``z_end``.

    ``stop(z, y)`` is checked after every accepted step and ends the run when
    it returns True. A :class:`DegenerateSlope` raised by ``fun`` inside a
    step causes that step to be rejected and retried with a smaller size; if
    it is raised at an accepted state the run ends with status "degenerate".

    Raises StepSizeCollapse if the step underflows, or more than
    ``max_steps`` steps are accepted, before ``z_end`` or a stop. The
    exception carries the steps accepted so far as ``partial``.
    """
    y = np.array(y0, dtype=float)
    z = float(z0)
    zs, ys, segments = [z], [y.copy()], []
    try:
        f = fun(z, y)
    except DegenerateSlope:
        return Solution(np.array(zs), np.array(ys).T, segments, "degenerate")
    h = first_step if first_step is not None else _initial_step(
        fun, z, y, f, rtol, atol)
    h = min(h, max_step, z_end - z)
    status = "complete"

    def collapse(message):
        exc = StepSizeCollapse(message)
        exc.partial = Solution(np.array(zs), np.array(ys).T, segments, "collapsed")
        return exc

    while z < z_end:
        h_min = 16 * np.spacing(max(abs(z), 1.0))
        if h < h_min:
            raise collapse(f"step size {h:.3e} underflowed at z={z!r}, y={y!r}")
        if len(segments) >= max_steps:
            raise collapse(f"{max_steps} steps taken without reaching z={z_end!r}; "
                           f"stalled at z={z!r}, y={y!r}")
        if z + h > z_end:
            h = z_end - z
        K = np.empty((7, y.size))
        K[0] = f
        try:
            for s in range(1, 6):
                K[s] = fun(z + C[s] * h, y + h * (np.dot(A[s], K[:s])))
            y_new = y + h * np.dot(B, K[:6])
            K[6] = fun(z + h, y_new)
        except DegenerateSlope:
            h *= 0.25
            continue
        err_vec = h * (E @ K)
        scale = atol + np.maximum(np.abs(y), np.abs(y_new)) * rtol
        err = _rms_norm(err_vec / scale)
        if not np.isfinite(err):
            h *= 0.25
            continue
        if err > 1.0:
            h *= max(MIN_FACTOR, SAFETY * err ** -0.2)
            continue

        segments.append(Segment(z, h, y.copy(), K.T @ P))
        z_next = z + h
        if z_end - z_next < 4 * np.spacing(abs(z_end)):
            z_next = z_end
        z, y, f = z_next, y_new, K[6]
        zs.append(z)
        ys.append(y.copy())
        factor = MAX_FACTOR if err == 0 else min(MAX_FACTOR, SAFETY * err ** -0.2)
        h = min(h * factor, max_step)
        if stop is not None and stop(z, y):
            status = "stopped"
            break

    return Solution(np.array(zs), np.array(ys).T, segments, status)
