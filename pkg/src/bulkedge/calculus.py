"""Spectral functional calculus, contour-integral cross-check, and kernel
decay / resolvent estimates.

The default route for g(H) is a full dense eigendecomposition (desk scale);
the contour-integral route (quasi-analytic extension of g against the
resolvent) is an independent cross-check of the same operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import (
    ConditionUnsatisfied,
    GapClosed,
    InsufficientRange,
    QuadratureUnresolved,
)
from .lattice import HermitianLatticeOperator, spectral_gap
from .switching import SwitchFunction

__all__ = [
    "SpectralDecomposition",
    "DecayProfile",
    "CTReport",
    "decompose",
    "fermi_projection",
    "matrix_function",
    "hs_matrix_function",
    "decay_profile",
    "combes_thomas_check",
]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (sorted) and orthonormal eigenvector columns of H."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def apply(self, func):
        """V f(Lambda) V* for a scalar function of the eigenvalues."""
        fw = np.asarray(func(self.eigenvalues))
        V = self.eigenvectors
        M = (V * fw[None, :]) @ V.conj().T
        return 0.5 * (M + M.conj().T)

    def reconstruction_residual(self, H):
        V, w = self.eigenvectors, self.eigenvalues
        return float(np.linalg.norm(H - (V * w[None, :]) @ V.conj().T, 2))

    def orthonormality_residual(self):
        V = self.eigenvectors
        return float(np.linalg.norm(V.conj().T @ V - np.eye(V.shape[1]), 2))


def decompose(op):
    w, V = np.linalg.eigh(op.matrix)
    return SpectralDecomposition(eigenvalues=w, eigenvectors=V)


def fermi_projection(op, mu, gap_tol=1e-9, decomposition=None):
    """Spectral projection onto eigenvalues <= mu.

    mu must sit strictly inside an open gap of the truncated spectrum
    (GapClosed otherwise).  The result passes idempotency and Hermiticity
    residuals below 1e-10.
    """
    dec = decompose(op) if decomposition is None else decomposition
    spectral_gap(op, mu, tol=gap_tol, eigenvalues=dec.eigenvalues)
    occ = dec.eigenvalues <= mu
    V = dec.eigenvectors[:, occ]
    P = V @ V.conj().T
    P = 0.5 * (P + P.conj().T)
    residual = np.linalg.norm(P @ P - P, 2)
    if residual > 1e-10:
        raise RuntimeError(f"projection idempotency residual {residual:.2e} too large")
    return op.with_matrix(P)


def matrix_function(op, func, decomposition=None):
    """g(H) = V g(Lambda) V* for a switch function or scalar callable."""
    dec = decompose(op) if decomposition is None else decomposition
    return op.with_matrix(dec.apply(func))


def _left_closed_derivatives(g, lam_min, order):
    """Derivative table of g times a left closing switch.

    A switch function is 1 at -infinity, so its quasi-analytic extension has
    noncompact support; since the operator is bounded we may close g below
    the spectrum without changing g(H).  The closing switch rises 0 -> 1 on
    [lam_min - 2w, lam_min - w], disjoint from supp g', so no product rule
    cross-terms appear.
    """
    glo, ghi = g.support_interval
    w = max(1.0, 0.5 * (ghi - glo))
    llo, lhi = lam_min - 2.0 * w, lam_min - w
    left = SwitchFunction((llo, lhi), g.profile, g.profile_order)

    def geff(x, k):
        if k == 0:
            return g(x) * (1.0 - left(x))
        return g.derivative(x, k) - left.derivative(x, k)

    return geff, llo


def hs_matrix_function(
    op,
    g,
    extension_order=2,
    base_grid=(65, 17),
    tol=1e-6,
    max_refinements=3,
    chi_delta=0.5,
):
    """g(H) as the plane integral of the resolvent against the
    quasi-analytic extension of g.

    The extension is g_tilde(z) = sum_k g^(k)(x) (iy)^k / k! * chi(y) with an
    even compactly supported cutoff chi equal to 1 near y = 0, so that

        dbar g_tilde = g^(N+1)(x) (iy)^N / N! * chi(y)
                       + i sum_k g^(k)(x) (iy)^k / k! * chi'(y).

    The integral (1/2pi) int dbar(g_tilde) (H - z)^(-1) dx dy is taken over
    the upper half-plane only; the lower half is its Hermitian conjugate, so
    the result is exactly Hermitian.  The tensor grid is refined (doubled in
    each direction) until successive results differ by less than ``tol`` in
    max norm; QuadratureUnresolved is raised if that never happens.
    """
    if extension_order < 1:
        raise ValueError("extension order must be >= 1")
    if g.profile == "smooth_bump_integral" and extension_order > 2:
        raise ValueError("bump profile provides derivatives up to order 3 only")
    H = op.matrix
    n = H.shape[0]
    w = np.linalg.eigvalsh(H)
    geff, llo = _left_closed_derivatives(g, w[0], extension_order)
    ghi = g.support_interval[1]
    xlo, xhi = llo - 0.5, ghi + 0.5
    ymax = 2.0 * chi_delta
    chi = SwitchFunction((chi_delta, ymax), g.profile, g.profile_order)

    N = extension_order
    identity = np.eye(n)

    def dbar(xs, y):
        val = geff(xs, N + 1) * (1j * y) ** N / factorial(N) * chi(np.array([y]))[0]
        series = np.zeros_like(xs, dtype=complex)
        for k in range(N + 1):
            series += geff(xs, k) * (1j * y) ** k / factorial(k)
        dchi = chi.derivative(np.array([y]), 1)[0]  # chi(|y|), y > 0 here
        return val + 1j * series * dchi

    def quadrature(nx, ny):
        xs, wx = np.polynomial.legendre.leggauss(nx)
        xs = 0.5 * (xhi - xlo) * xs + 0.5 * (xhi + xlo)
        wx = 0.5 * (xhi - xlo) * wx
        ys, wy = np.polynomial.legendre.leggauss(ny)
        ys = 0.5 * ymax * ys + 0.5 * ymax
        wy = 0.5 * ymax * wy
        acc = np.zeros((n, n), complex)
        chunk = max(1, 2_000_000 // (n * n))
        for y, wyj in zip(ys, wy):
            coeff = dbar(xs, y) * wx * wyj
            nz = np.abs(coeff) > 1e-300
            if not nz.any():
                continue
            zs = xs[nz] + 1j * y
            cs = coeff[nz]
            for start in range(0, len(zs), chunk):
                zb = zs[start : start + chunk]
                resolvents = np.linalg.inv(H[None, :, :] - zb[:, None, None] * identity)
                acc += np.tensordot(cs[start : start + chunk], resolvents, axes=(0, 0))
        half = acc / (2.0 * np.pi)
        return half + half.conj().T

    nx, ny = base_grid
    prev = quadrature(nx, ny)
    for _ in range(max_refinements):
        nx, ny = 2 * nx, 2 * ny
        cur = quadrature(nx, ny)
        delta = float(np.max(np.abs(cur - prev)))
        if delta < tol:
            return op.with_matrix(cur), delta
        prev = cur
    raise QuadratureUnresolved(
        f"grid {nx}x{ny} still moving by {delta:.2e} (tol {tol})"
    )


@dataclass(frozen=True)
class DecayProfile:
    weight: str
    distance_bins: np.ndarray
    max_abs_kernel: np.ndarray
    exp_rate: float
    exp_intercept: float
    poly_order: float
    fit_window: tuple[int, int]

    def populated(self):
        return self.max_abs_kernel > 0


def decay_profile(op, weight="polynomial", min_bins=4, fit_upper=None):
    """Bin |T(r1, r2)| by a distance-like coordinate and fit its decay.

    weight = 'polynomial'             : bin by round(|r1 - r2|)
             'exponential_in_y'       : bin by min(y1, y2)
             'exponential_in_y1plusy2': bin by y1 + y2

    Fits are least squares on log(max per bin) over the middle 60% of the
    populated bins, avoiding window artefacts at both ends.  ``fit_upper``
    additionally caps the fit coordinate; the y-weighted modes need it on
    finite windows, whose artificial top edge repopulates large-y bins that
    the half-infinite estimate says must be empty.  Reports both an
    exponential rate and a polynomial order; which one is meaningful depends
    on the operator under test.  An all-but-diagonal-zero operator gets
    rate +inf (faster decay than any window can measure).
    """
    geom = op.geometry
    absT = np.abs(op.matrix)
    if weight == "polynomial":
        coord = np.rint(geom.distances()).astype(int)
    elif weight == "exponential_in_y":
        _, ys = geom.site_coords()
        coord = np.minimum(ys[:, None], ys[None, :])
    elif weight == "exponential_in_y1plusy2":
        _, ys = geom.site_coords()
        coord = ys[:, None] + ys[None, :]
    else:
        raise ValueError(f"unknown weight {weight!r}")
    cmin = int(coord.min())
    nbins = int(coord.max()) - cmin + 1
    flat = (coord - cmin).ravel()
    vals = absT.ravel()
    maxima = np.zeros(nbins)
    np.maximum.at(maxima, flat, vals)
    bins = np.arange(cmin, cmin + nbins)
    if nbins < min_bins:
        raise InsufficientRange(f"only {nbins} realized bins; need {min_bins}")
    fittable = (maxima > 0) & (bins > 0)
    if fit_upper is not None:
        fittable &= bins <= fit_upper
    populated = np.flatnonzero(fittable)
    if populated.size < 2:
        return DecayProfile(
            weight=weight,
            distance_bins=bins,
            max_abs_kernel=maxima,
            exp_rate=np.inf,
            exp_intercept=-np.inf,
            poly_order=np.inf,
            fit_window=(0, 0),
        )
    lo = populated[int(0.2 * populated.size)]
    hi = populated[int(np.ceil(0.8 * populated.size)) - 1]
    sel = populated[(populated >= lo) & (populated <= hi)]
    if sel.size < 2:
        sel = populated
    logs = np.log(maxima[sel])
    slope, intercept = np.polyfit(bins[sel], logs, 1)
    pslope, _ = np.polyfit(np.log(bins[sel]), logs, 1)
    return DecayProfile(
        weight=weight,
        distance_bins=bins,
        max_abs_kernel=maxima,
        exp_rate=float(-slope),
        exp_intercept=float(intercept),
        poly_order=float(-pslope),
        fit_window=(int(bins[sel][0]), int(bins[sel][-1])),
    )


@dataclass(frozen=True)
class CTReport:
    z: complex
    distance: float
    mu: float
    condition_lhs: float
    condition_rhs: float
    worst_ratio: float
    passes: bool


def suggest_ct_rate_factor(op, z, eigenvalues=None, safety=0.9):
    """Largest c (times a safety factor) for which mu = c * dist satisfies
    the short-range admissibility condition of the resolvent bound."""
    H = op.matrix
    w = np.linalg.eigvalsh(H) if eigenvalues is None else np.asarray(eigenvalues)
    dist = float(np.min(np.abs(w - z)))
    if dist <= 0:
        raise ConditionUnsatisfied("z lies in the truncated spectrum")
    d = op.geometry.distances()
    absH = np.abs(H)

    def lhs(mu):
        return float(np.max((absH * np.expm1(mu * d)).sum(axis=1)))

    hi = 1.0
    while lhs(hi * dist) < dist / 2.0 and hi < 64:
        hi *= 2.0
    lo = 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if lhs(mid * dist) <= dist / 2.0:
            lo = mid
        else:
            hi = mid
    return safety * lo


def combes_thomas_check(op, z, c=0.5, eigenvalues=None):
    """Entrywise resolvent bound |R(r1,r2;z)| <= (2/dist) exp(-mu |r1-r2|).

    mu = c * dist(z, spectrum); first verifies the short-range condition
    sup_r sum_r' |H(r,r')| (e^(mu |r-r'|) - 1) <= dist/2 (ConditionUnsatisfied
    if it fails -- a precondition failure, not a bound violation), then
    reports the largest violation ratio over all site pairs.
    """
    H = op.matrix
    w = np.linalg.eigvalsh(H) if eigenvalues is None else np.asarray(eigenvalues)
    dist = float(np.min(np.abs(w - z)))
    if dist <= 0:
        raise ConditionUnsatisfied("z lies in the truncated spectrum")
    mu = c * dist
    d = op.geometry.distances()
    lhs = float(np.max((np.abs(H) * np.expm1(mu * d)).sum(axis=1)))
    if lhs > dist / 2.0:
        raise ConditionUnsatisfied(
            f"short-range sum {lhs:.3g} exceeds dist/2 = {dist / 2:.3g}; reduce c"
        )
    R = np.linalg.inv(H - z * np.eye(H.shape[0]))
    bound = (2.0 / dist) * np.exp(-mu * d)
    worst = float(np.max(np.abs(R) / bound))
    return CTReport(
        z=complex(z),
        distance=dist,
        mu=mu,
        condition_lhs=lhs,
        condition_rhs=dist / 2.0,
        worst_ratio=worst,
        passes=bool(worst <= 1.0),
    )
