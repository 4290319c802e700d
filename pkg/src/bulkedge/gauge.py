"""Diagonal gauge unitaries: the full winding phase U and its truncated
(check) and boundary-pulled (hat) variants.

All three are multiplication operators, one unit-modulus phase per site.
The full U(r) = exp(i*phi(arg(r - center))) carries its nontriviality in an
upward wedge; the check variant resets U to 1 below a height a; the hat
variant replaces the flux tube by a single-valued function whose boundary
rows reduce exactly to exp(2*pi*i*chi(x/a)) and which obeys the scaling law
hat_U_a(r) = hat_U_1(r/a) relative to the flux center.

Conventions: angles from atan2 with branch (-pi, pi], wedge opening upward;
a site coinciding with the flux center gets phase exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .switching import PhaseProfile, SwitchFunction

__all__ = [
    "GaugePhase",
    "BoundReport",
    "flux_phase",
    "truncated_phase",
    "pulled_phase",
    "phase_difference_bounds",
]


@dataclass(frozen=True)
class GaugePhase:
    """Diagonal unitary over the sites of a lattice window."""

    geometry: object
    phases: np.ndarray
    kind: str  # 'full', 'check', 'hat'
    flux_center: tuple[float, float]
    truncation_height: float | None = None
    fingerprint: str = ""

    def __post_init__(self):
        if self.phases.shape != (self.geometry.n_sites,):
            raise ValueError("one phase per site required")
        self.phases.flags.writeable = False

    @property
    def diagonal(self):
        return self.phases

    def conjugate_kernel(self, M):
        """U M U* for diagonal U."""
        u = self.phases
        return (u[:, None] * M) * u.conj()[None, :]

    def max_modulus_error(self):
        return float(np.max(np.abs(np.abs(self.phases) - 1.0)))


def _angles(geom, center):
    xs, ys = geom.site_coords()
    return np.arctan2(ys - center[1], xs - center[0]), xs, ys


def flux_phase(profile, center, geom):
    """Full winding gauge U(r) = exp(i*phi(arg(r - center))).

    Sites with phi in {0, 2*pi} (everything outside the wedge) get phase
    exactly 1; a site exactly at the center also gets 1 (arg undefined).
    """
    theta, xs, ys = _angles(geom, center)
    phi = profile(theta)
    phases = np.exp(1j * phi)
    trivial = (phi == 0.0) | (phi == 2.0 * np.pi)
    trivial |= (xs == center[0]) & (ys == center[1])
    phases[trivial] = 1.0
    return GaugePhase(
        geometry=geom,
        phases=phases,
        kind="full",
        flux_center=(float(center[0]), float(center[1])),
        fingerprint=f"full({center[0]:.6g},{center[1]:.6g});{profile.fingerprint()}",
    )


def truncated_phase(base, a):
    """Check variant: phases of ``base`` for y >= a, exactly 1 for y < a."""
    if base.kind != "full":
        raise ValueError("truncation starts from a full winding gauge")
    _, ys = base.geometry.site_coords()
    phases = base.phases.copy()
    phases[ys < a] = 1.0
    return GaugePhase(
        geometry=base.geometry,
        phases=phases,
        kind="check",
        flux_center=(base.flux_center[0], float(a)),
        truncation_height=float(a),
        fingerprint=f"check(a={a});{base.fingerprint}",
    )


def pulled_phase(a, chi, geom, profile=None, center_x=None):
    """Hat variant: single-valued exponent interpolating the boundary switch
    into the angular profile.

    exponent(r) = (1 - B(y/a)) * chi((x - cx)/a) + B(y/a) * phi(theta)/(2*pi)
    with B a rising switch supported on y/a in [1/2, 1].  Rows with
    y < a/2 therefore carry exactly exp(2*pi*i*chi(x/a)); for y >= a the
    exponent equals phi/(2*pi), matching the full wedge gauge.  Built from
    scale-free combinations of r/a, so hat_U_{s*a}(center + s*v) =
    hat_U_a(center + v).
    """
    if a < 1:
        raise ValueError("pulled gauge needs a >= 1")
    if profile is None:
        profile = PhaseProfile()
    if center_x is None:
        center_x = 0.0  # lattice origin, matching the full-gauge default
    center = (center_x, 0.0)
    theta, xs, ys = _angles(geom, center)
    s_ang = profile(theta) / (2.0 * np.pi)
    at_center = (xs == center[0]) & (ys == center[1])
    s_ang[at_center] = 0.0
    blend_switch = SwitchFunction((0.5, 1.0), chi.profile, chi.profile_order)
    B = 1.0 - blend_switch(ys / a)  # rising: 0 below a/2, 1 above a
    chi_scaled = chi((xs - center_x) / a)
    exponent = (1.0 - B) * chi_scaled + B * s_ang
    phases = np.exp(2j * np.pi * exponent)
    trivial = (exponent == 0.0) | (exponent == 1.0)
    phases[trivial] = 1.0
    return GaugePhase(
        geometry=geom,
        phases=phases,
        kind="hat",
        flux_center=center,
        truncation_height=float(a),
        fingerprint=f"hat(a={a});chi:{chi.fingerprint()};{profile.fingerprint()}",
    )


@dataclass(frozen=True)
class BoundReport:
    kind: str
    constant: float
    worst_pair: tuple[int, int]
    n_pairs: int


def phase_difference_bounds(gauge, sample=None, k=2):
    """Worst constant realising the Lipschitz-type difference bound for the
    gauge kind.

    full : |U(r1) - U(r2)| <= C |r1 - r2| / (1 + |r1 - c|)
    hat  : |U(r1) - U(r2)| <= C |r1 - r2| / (a + |r2 - c|)
    check: |U(r1) - U(r2)| <= C_k (1 + (|x2 - cx| - a - y2)_+)^(-k)
                                  * (1 + |r1 - r2|)^k

    ``sample`` is an iterable of site-index pairs; by default a deterministic
    subsample of all pairs is used.  Returns the supremum of the realised
    ratio |dU| / bound_shape over the sample.
    """
    geom = gauge.geometry
    xs, ys = geom.site_coords()
    cx, cy = gauge.flux_center
    n = geom.n_sites
    if sample is None:
        rng = np.random.default_rng(20260810)
        m = min(200000, n * (n - 1) // 2)
        i = rng.integers(0, n, size=m)
        j = rng.integers(0, n, size=m)
        keep = i != j
        i, j = i[keep], j[keep]
    else:
        pairs = np.asarray(list(sample))
        if pairs.size == 0:
            raise ValueError("sample must be nonempty")
        i, j = pairs[:, 0], pairs[:, 1]
    du = np.abs(gauge.phases[i] - gauge.phases[j])
    sep = np.hypot(xs[i] - xs[j], ys[i] - ys[j])
    with np.errstate(divide="ignore", invalid="ignore"):
        if gauge.kind == "full":
            r1 = np.hypot(xs[i] - cx, ys[i] - cy)
            shape = sep / (1.0 + r1)
        elif gauge.kind == "hat":
            a = gauge.truncation_height
            r2 = np.hypot(xs[j] - cx, ys[j] - cy)
            shape = sep / (a + r2)
        elif gauge.kind == "check":
            a = gauge.truncation_height
            excess = np.maximum(np.abs(xs[j] - cx) - a - ys[j], 0.0)
            shape = (1.0 + sep) ** k / (1.0 + excess) ** k
        else:
            raise ValueError(f"unknown gauge kind {gauge.kind!r}")
        ratio = np.where(du > 0, du / shape, 0.0)
    ratio = np.nan_to_num(ratio, nan=0.0, posinf=np.inf)
    worst = int(np.argmax(ratio))
    return BoundReport(
        kind=gauge.kind,
        constant=float(ratio[worst]),
        worst_pair=(int(i[worst]), int(j[worst])),
        n_pairs=int(len(i)),
    )
