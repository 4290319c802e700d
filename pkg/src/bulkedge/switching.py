"""Smooth switch functions and winding phase profiles.

A switch function g is smooth, equals 1 left of its support interval and 0
right of it, and is monotone nonincreasing with g' supported inside the
interval.  Two profiles are provided: the C-infinity bump integral (default)
and a finite-order polynomial smoothstep (cheaper, finitely smooth).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np
from scipy.interpolate import PchipInterpolator

__all__ = ["SwitchFunction", "PhaseProfile", "bump", "bump_derivatives"]

_GRID_N = 4097  # resolution of the cumulative bump table


def bump(s):
    """C-infinity bump exp(-1/(s(1-s))) on (0,1), zero outside."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = (s > 0.0) & (s < 1.0)
    si = s[inside]
    out[inside] = np.exp(-1.0 / (si * (1.0 - si)))
    return out


def bump_derivatives(s, order):
    """Derivatives of the bump up to order 2.

    b' = f' b and b'' = (f'' + f'^2) b with f = -1/(s - s^2); higher orders
    are not needed (quasi-analytic extensions stop at order 2 here).
    """
    if order not in (0, 1, 2):
        raise ValueError("bump derivatives implemented for order <= 2")
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = (s > 0.0) & (s < 1.0)
    si = s[inside]
    w = si - si * si
    b = np.exp(-1.0 / w)
    if order == 0:
        out[inside] = b
    elif order == 1:
        fp = (1.0 - 2.0 * si) / w**2
        out[inside] = fp * b
    else:
        fp = (1.0 - 2.0 * si) / w**2
        fpp = -2.0 / w**2 - 2.0 * (1.0 - 2.0 * si) ** 2 / w**3
        out[inside] = (fpp + fp * fp) * b
    return out


@lru_cache(maxsize=8)
def _bump_cumulative():
    """Monotone interpolant of the normalised bump integral on [0,1]."""
    s = np.linspace(0.0, 1.0, _GRID_N)
    b = bump(s)
    h = s[1] - s[0]
    cum = np.zeros_like(s)
    cum[1:] = np.cumsum(0.5 * h * (b[1:] + b[:-1]))
    total = cum[-1]
    return PchipInterpolator(s, cum / total), total


@lru_cache(maxsize=32)
def _smoothstep_coeffs(order):
    """Coefficients of the normalised integral of u^n (1-u)^n."""
    n = order
    kernel = np.zeros(2 * n + 1)
    for k in range(n + 1):
        kernel[n + k] = comb(n, k) * (-1.0) ** k
    integ = np.polynomial.polynomial.polyint(kernel)
    integ /= np.polynomial.polynomial.polyval(1.0, integ)
    return integ


@dataclass(frozen=True)
class SwitchFunction:
    """Monotone switch g with g=1 below the support interval and 0 above.

    Parameters
    ----------
    support_interval : (float, float)
        (lo, hi) with lo < hi; g' is supported inside this interval.
    profile : str
        'smooth_bump_integral' (C-infinity, default) or
        'high_order_smoothstep' (polynomial, derivative of all orders exact).
    profile_order : int
        Order n of the smoothstep kernel u^n (1-u)^n; ignored for the bump.
    """

    support_interval: tuple[float, float]
    profile: str = "smooth_bump_integral"
    profile_order: int = 8

    def __post_init__(self):
        lo, hi = self.support_interval
        if not lo < hi:
            raise ValueError(f"support interval must have lo < hi, got {self.support_interval}")
        if self.profile not in ("smooth_bump_integral", "high_order_smoothstep"):
            raise ValueError(f"unknown profile {self.profile!r}")
        if self.profile_order < 1:
            raise ValueError("profile_order must be >= 1")

    @property
    def width(self):
        lo, hi = self.support_interval
        return hi - lo

    def _scaled(self, lam):
        lo, _ = self.support_interval
        return (np.asarray(lam, dtype=float) - lo) / self.width

    def __call__(self, lam):
        """Evaluate g(lam); exactly 1/0 outside the support interval."""
        u = self._scaled(lam)
        out = np.zeros_like(u)
        out[u <= 0.0] = 1.0
        inside = (u > 0.0) & (u < 1.0)
        if inside.any():
            # kernel is symmetric: g = 1 - S(u) = S(1 - u); evaluating the
            # cumulative at the small argument avoids cancellation near 1
            ui = u[inside]
            small = np.minimum(ui, 1.0 - ui)
            if self.profile == "smooth_bump_integral":
                interp, _ = _bump_cumulative()
                cum = interp(small)
            else:
                coeffs = _smoothstep_coeffs(self.profile_order)
                cum = np.polynomial.polynomial.polyval(small, coeffs)
            out[inside] = np.where(ui <= 0.5, 1.0 - cum, cum)
        return out if out.ndim else float(out)

    def derivative(self, lam, order=1):
        """d^k g / d lam^k; supported inside the support interval.

        The bump profile provides orders 1..3 in closed form, which covers
        quasi-analytic extensions up to extension order 2.  The smoothstep
        profile differentiates its polynomial exactly at any order.
        """
        if order < 1:
            raise ValueError("order must be >= 1")
        u = self._scaled(lam)
        out = np.zeros_like(u)
        inside = (u > 0.0) & (u < 1.0)
        if inside.any():
            # kernel symmetry: S^(k)(u) = (-1)^(k-1) S^(k)(1-u); evaluate at
            # the small argument for accuracy
            ui = u[inside]
            small = np.minimum(ui, 1.0 - ui)
            sign = np.where(ui <= 0.5, 1.0, (-1.0) ** (order - 1))
            if self.profile == "smooth_bump_integral":
                _, total = _bump_cumulative()
                vals = bump_derivatives(small, order - 1) / total
            else:
                coeffs = np.polynomial.polynomial.polyder(
                    _smoothstep_coeffs(self.profile_order), order
                )
                vals = np.polynomial.polynomial.polyval(small, coeffs)
            out[inside] = -sign * vals
        out = out / self.width**order
        return out if out.ndim else float(out)

    def deriv_fn(self, order=1):
        """Vectorised callable for the order-th derivative."""
        return lambda lam: self.derivative(lam, order)

    def fingerprint(self):
        lo, hi = self.support_interval
        return f"{self.profile}[{lo:.6g},{hi:.6g}]o{self.profile_order}"


@dataclass(frozen=True)
class PhaseProfile:
    """Winding-1 angular ramp phi: the phase climbs 0 -> 2*pi across a wedge.

    phi(theta) = 0 below the angular support, 2*pi above it, and rises
    smoothly in between, so exp(i*phi) is continuous across the branch cut
    and winds exactly once.
    """

    support: tuple[float, float] = (np.pi / 4, 3 * np.pi / 4)
    profile: str = "smooth_bump_integral"
    profile_order: int = 8
    winding: int = field(default=1, init=False)

    def _switch(self):
        return SwitchFunction(self.support, self.profile, self.profile_order)

    def __call__(self, theta):
        """phi(theta) in [0, 2*pi] for theta in (-pi, pi]."""
        g = self._switch()
        return 2.0 * np.pi * (1.0 - g(theta))

    def derivative(self, theta):
        g = self._switch()
        return -2.0 * np.pi * g.derivative(theta, 1)

    def fingerprint(self):
        return "phi:" + self._switch().fingerprint()
