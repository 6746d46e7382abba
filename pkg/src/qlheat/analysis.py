"""Verification harnesses.

* Point symmetries of the quasilinear equation (time shift, space shift,
  temperature shift and the dilatation ``(t, x, T) -> (e^{2e} t, e^e x, e^e T)``)
  and a numerical invariance check on computed solutions.
* The closed-form solution of the linear heat equation with zero initial
  data and boundary value ``B sqrt(t)``.
* Cross-validation of a PDE run against a similarity profile.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .errors import MissingSnapshot, WindowExceeded
from .flux_law import PhysParams
from .pde_solver import SolveReport
from .similarity import SimilarityProfile, locate_front

SYMMETRY_MARGIN = 2  # nodes excluded next to each boundary
_SNAP = 1e-9  # fractional indices this close to an integer are snapped


@dataclass(frozen=True)
class GroupElement:
    """Element of the four-parameter symmetry group.

    Acts as dilatation by ``eps`` followed by the translations
    ``(tau, xi, theta)`` in ``(t, x, T)``.
    """

    tau: float = 0.0
    xi: float = 0.0
    theta: float = 0.0
    eps: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.tau, self.xi, self.theta, self.eps)):
            raise ValueError("group parameters must be finite")

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls()

    def compose(self, other: "GroupElement") -> "GroupElement":
        """Element acting as ``other`` first, then ``self``."""
        s = math.exp(self.eps)
        return GroupElement(
            tau=self.tau + s * s * other.tau,
            xi=self.xi + s * other.xi,
            theta=self.theta + s * other.theta,
            eps=self.eps + other.eps,
        )

    def inverse(self) -> "GroupElement":
        s = math.exp(-self.eps)
        return GroupElement(tau=-s * s * self.tau, xi=-s * self.xi,
                            theta=-s * self.theta, eps=-self.eps)


def transform_point(g: GroupElement, t, x, T):
    """Image of ``(t, x, T)`` under ``g``."""
    s = math.exp(g.eps)
    return s * s * t + g.tau, s * x + g.xi, s * T + g.theta


# -- symmetry residual -----------------------------------------------------

def _uniform_spacing(times):
    if times.size < 3:
        raise ValueError("need at least 3 snapshots for a time derivative")
    steps = np.diff(times)
    dt = (times[-1] - times[0]) / (times.size - 1)
    if np.max(np.abs(steps - dt)) > 1e-9 * dt:
        raise ValueError("symmetry residual needs uniformly spaced snapshots")
    return dt


def _snap(q):
    r = np.rint(q)
    return np.where(np.abs(q - r) < _SNAP, r, q)


def _bilinear(S, qt, qx):
    """Interpolate snapshot array ``S[k, i]`` at fractional indices."""
    kt = np.minimum(np.floor(qt).astype(int), S.shape[0] - 2)
    kx = np.minimum(np.floor(qx).astype(int), S.shape[1] - 2)
    wt = qt - kt
    wx = qx - kx
    lo = (1 - wx) * S[kt, kx] + wx * S[kt, kx + 1]
    hi = (1 - wx) * S[kt + 1, kx] + wx * S[kt + 1, kx + 1]
    return (1 - wt) * lo + wt * hi


def _residual_field(g, report, p, margin=SYMMETRY_MARGIN):
    """Residual of the transformed solution at report times and grid nodes.

    Returns ``(R, mask)`` of shape (n_snapshots, n_nodes); ``mask`` marks the
    points whose pulled-back stencil lies inside the solved window.
    """
    times = report.times
    dt = _uniform_spacing(times)
    grid = report.final.grid
    S = np.stack([s.values for s in report.snapshots])
    K, n = S.shape
    s = math.exp(g.eps)

    t_tilde = times[:, None]
    x_tilde = grid.x[None, :]
    # pulled-back coordinates as fractional snapshot / node indices
    qt = _snap(((t_tilde - g.tau) / (s * s) - times[0]) / dt)
    qx = _snap(((x_tilde - g.xi) / s - grid.x0) / grid.dx)
    qt, qx = np.broadcast_arrays(qt, qx)
    mask = ((qt >= 1) & (qt <= K - 2) & (qx >= margin) & (qx <= n - 1 - margin))
    R = np.full((K, n), np.nan)
    if not np.any(mask):
        return R, mask
    qt, qx = qt[mask], qx[mask]

    # stencil widths are the images of (dt, dx) under the dilatation
    ht = s * s * dt
    hx = s * grid.dx
    u_c = s * _bilinear(S, qt, qx)
    u_tp = s * _bilinear(S, qt + 1, qx)
    u_tm = s * _bilinear(S, qt - 1, qx)
    u_xp = s * _bilinear(S, qt, qx + 1)
    u_xm = s * _bilinear(S, qt, qx - 1)
    # theta shifts every sample equally and cancels from all differences
    T_t = (u_tp - u_tm) / (2.0 * ht)
    T_x = (u_xp - u_xm) / (2.0 * hx)
    T_xx = (u_xp - 2.0 * u_c + u_xm) / (hx * hx)
    g2 = T_x * T_x
    R[mask] = T_t - (p.D_T * g2 / (g2 + p.a * p.a)) * T_xx
    return R, mask


def discrete_residual(report: SolveReport, p: PhysParams) -> np.ndarray:
    """The computed solution's own residual, central differences over
    snapshots in time and nodes in space (NaN outside the interior)."""
    R, _ = _residual_field(GroupElement.identity(), report, p)
    return R


def symmetry_residual(g: GroupElement, report: SolveReport, p: PhysParams,
                      margin=SYMMETRY_MARGIN) -> float:
    """Sup norm of the quasilinear residual of the transformed solution.

    The transformed field ``e^eps T(e^{-2 eps}(t - tau), e^{-eps}(x - xi)) +
    theta`` is built by bilinear interpolation of the report's snapshots,
    which must be uniformly spaced in time. It is evaluated at the report's
    own snapshot times and grid nodes wherever the pulled-back stencil stays
    inside the solved window. Raises WindowExceeded if no such point exists.
    """
    R, mask = _residual_field(g, report, p, margin)
    if not np.any(mask):
        raise WindowExceeded(f"{g} maps every evaluation point outside the solution window")
    return float(np.max(np.abs(R[mask])))


# -- linear baseline -------------------------------------------------------

def i1erfc(eta):
    """First iterated complementary error function, ``int_eta^inf erfc``."""
    eta = np.asarray(eta, dtype=float)
    out = np.exp(-eta * eta) / math.sqrt(math.pi) - eta * erfc(eta)
    return float(out) if out.ndim == 0 else out


def linear_oracle(t, x, B, p: PhysParams):
    """Exact solution of ``T_t = D_T T_xx`` on ``x >= 0`` with ``T(0, x) = 0``
    and ``T(t, 0) = B sqrt(t)``."""
    if not np.all(np.asarray(t) > 0):
        raise ValueError("linear_oracle needs t > 0")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("linear_oracle needs x >= 0")
    t = np.asarray(t, dtype=float)
    eta = x / (2.0 * np.sqrt(p.D_T * t))
    out = B * np.sqrt(t) * math.sqrt(math.pi) * np.asarray(i1erfc(eta))
    return float(out) if out.ndim == 0 else out


# -- PDE vs similarity -----------------------------------------------------

def cross_validate(report: SolveReport, profile: SimilarityProfile, t_check,
                   fraction=0.9) -> float:
    """Largest deviation of a PDE snapshot from ``sqrt(t) f(x / sqrt(t))``.

    Taken over nodes with ``x <= fraction * z0 * sqrt(t_check)`` and scaled by
    the boundary value ``B sqrt(t_check)``.
    """
    snap = report.snapshot_at(t_check)
    if snap is None:
        raise MissingSnapshot(f"no snapshot at t={t_check!r}")
    z0 = locate_front(profile).z0
    st = math.sqrt(snap.t)
    x = snap.x
    sel = x <= fraction * z0 * st
    f = profile(x[sel] / st)
    err = np.abs(snap.values[sel] - st * f)
    return float(np.max(err)) / (abs(profile.B) * st)
