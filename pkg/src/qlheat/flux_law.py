"""Pointwise constitutive relations of the quasilinear conduction model.

All functions accept scalars or numpy arrays and broadcast. Scalar input
gives a Python float back.

The modified flux differs from Fourier's law by ``lam * a * arctan(g / a)``,
a term bounded by ``lam * a * pi / 2``. For ``|g / a|`` beyond about 1e15 the
arctangent saturates at +-pi/2, which is already the correct limit.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NonPhysicalParameterWarning

#: largest gradient scale for which the model is considered physically meaningful
A_PHYSICAL_MAX = 0.1


@dataclass(frozen=True)
class PhysParams:
    """Material constants.

    Attributes:
        D_T: temperature-conduction coefficient (diffusivity)
        a: gradient scale of the modified flux law
        lam: heat-conduction coefficient (lambda)
        c: thermal capacity
        rho: density
    """

    D_T: float
    a: float
    lam: float = 1.0
    c: float = 1.0
    rho: float = 1.0

    def __post_init__(self):
        for name in ("D_T", "a", "lam", "c", "rho"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        if abs(self.D_T - self.lam / (self.c * self.rho)) > 1e-12 * self.D_T:
            raise ValueError(
                f"inconsistent parameters: D_T={self.D_T!r} but "
                f"lam/(c*rho)={self.lam / (self.c * self.rho)!r}"
            )
        if self.a > A_PHYSICAL_MAX:
            warnings.warn(
                f"a={self.a!r} lies outside 0 < a <= {A_PHYSICAL_MAX}; "
                "the model is not expected to be physical there",
                NonPhysicalParameterWarning,
                stacklevel=3,
            )

    @classmethod
    def from_diffusivity(cls, D_T: float, a: float) -> "PhysParams":
        """Build from (D_T, a) alone, taking lam = D_T and c = rho = 1."""
        return cls(D_T=D_T, a=a, lam=D_T, c=1.0, rho=1.0)

    @classmethod
    def from_a_squared(cls, D_T: float, a_squared: float) -> "PhysParams":
        if not a_squared > 0:
            raise ValueError(f"a_squared must be > 0, got {a_squared!r}")
        return cls.from_diffusivity(D_T, math.sqrt(a_squared))

    @property
    def a_squared(self) -> float:
        return self.a * self.a

    @property
    def is_physical(self) -> bool:
        return self.a <= A_PHYSICAL_MAX


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def linear_flux(g, p: PhysParams):
    """Fourier flux ``-lam * g`` for a temperature gradient ``g``."""
    return _out(-p.lam * np.asarray(g, dtype=float) + 0.0)  # no signed zero


def modified_flux(g, p: PhysParams):
    """Flux ``-lam * (g - a * arctan(g / a))``.

    Odd in ``g``, carries the sign of :func:`linear_flux` and never exceeds
    it in magnitude.
    """
    g = np.asarray(g, dtype=float)
    r = g / p.a
    excess = g - p.a * np.arctan(r)
    small = np.abs(r) < _SERIES_CUTOFF
    if np.any(small):
        # r - arctan(r) cancels for small r; sum the odd series instead
        rs = np.where(small, r, 0.0)
        excess = np.where(small, p.a * (rs * rs * rs) * _series(rs * rs), excess)
    return _out(-p.lam * excess + 0.0)


_SERIES_CUTOFF = 0.25
# r - arctan(r) = r^3 * sum_k (-1)^k r^(2k) / (2k + 3)
_SERIES = [(-1) ** k / (2 * k + 3) for k in range(16)]


def _series(r2):
    acc = np.zeros_like(r2)
    for c in reversed(_SERIES):
        acc = acc * r2 + c
    return acc


def flux_gap(g, p: PhysParams):
    """Absolute difference between the linear and the modified flux.

    Uses the closed form ``lam * a * |arctan(g / a)|`` so large gradients do
    not suffer cancellation.
    """
    g = np.asarray(g, dtype=float)
    return _out(p.lam * p.a * np.abs(np.arctan(g / p.a)))


def effective_diffusivity(g, p: PhysParams):
    """Coefficient ``D_T * g**2 / (g**2 + a**2)`` multiplying T_xx."""
    g = np.asarray(g, dtype=float)
    g2 = g * g
    with np.errstate(invalid="ignore"):  # inf/inf, replaced below
        d = p.D_T * g2 / (g2 + p.a * p.a)
    if np.any(np.isinf(g2)):
        d = np.where(np.isinf(g2), p.D_T, d)
    return _out(d)
