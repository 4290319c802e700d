"""Tight-binding lattice models with magnetic flux, disorder, and boundaries.

Builds Harper/Hofstadter Hamiltonians in the Landau gauge A = (0, B x): the
x-hopping is -t anywhere, the y-hopping from (x, y) to (x, y+1) carries the
phase exp(2*pi*i*(p/q)*x).  A window with ``domain_kind='bulk_plane'`` and
periodic x is wrapped in both directions (a bulk sample has no boundary);
an open bulk window is open on all four sides.  Half-plane operators come
from Dirichlet restriction of an open bulk window that includes y < 0 rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .errors import GapClosed, DimensionMismatch

__all__ = [
    "LatticeGeometry",
    "ModelSpec",
    "HermitianLatticeOperator",
    "EdgeTerm",
    "LocalityReport",
    "GapReport",
    "build_bulk_hamiltonian",
    "restrict_half_plane",
    "verify_locality",
    "spectral_gap",
]


@dataclass(frozen=True)
class LatticeGeometry:
    """Finite rectangular window of the plane or half-plane.

    ``origin_offset = (ox, oy)`` places lattice coordinate (0, 0) at window
    position (ox, oy), so the window covers x in [-ox, width_x - ox) and
    y in [-oy, height_y - oy).  Sites are indexed column-major:
    ``i = (x - x0) * height_y + (y - y0)``.
    """

    width_x: int
    height_y: int
    x_boundary: str = "open"
    domain_kind: str = "bulk_plane"
    origin_offset: tuple[int, int] = (0, 0)
    y_boundary: str = "derived"

    def __post_init__(self):
        if self.width_x < 1 or self.height_y < 1:
            raise ValueError("geometry must have positive extent")
        if self.x_boundary not in ("open", "periodic"):
            raise ValueError(f"unknown x_boundary {self.x_boundary!r}")
        if self.domain_kind not in ("bulk_plane", "half_plane"):
            raise ValueError(f"unknown domain_kind {self.domain_kind!r}")
        if self.y_boundary not in ("derived", "open", "periodic"):
            raise ValueError(f"unknown y_boundary {self.y_boundary!r}")
        if self.domain_kind == "half_plane" and self.y0 < 0:
            raise ValueError("half_plane windows must have y >= 0 everywhere")
        if self.domain_kind == "half_plane" and self.y_boundary == "periodic":
            raise ValueError("a half-plane window cannot wrap in y")

    @property
    def x0(self):
        return -self.origin_offset[0]

    @property
    def y0(self):
        return -self.origin_offset[1]

    @property
    def n_sites(self):
        return self.width_x * self.height_y

    @property
    def wraps_y(self):
        # by default a periodic bulk window is a torus: no boundary in either
        # direction; y_boundary='open' overrides this to get a cylinder
        if self.y_boundary == "derived":
            return self.domain_kind == "bulk_plane" and self.x_boundary == "periodic"
        return self.y_boundary == "periodic"

    @property
    def wraps_x(self):
        return self.x_boundary == "periodic"

    def site_coords(self):
        """(xs, ys) lattice coordinates of every site, in index order."""
        xs = np.repeat(np.arange(self.x0, self.x0 + self.width_x), self.height_y)
        ys = np.tile(np.arange(self.y0, self.y0 + self.height_y), self.width_x)
        return xs, ys

    def index_of(self, x, y):
        return (x - self.x0) * self.height_y + (y - self.y0)

    def coord_of(self, i):
        return self.x0 + i // self.height_y, self.y0 + i % self.height_y

    def displacements(self):
        """(dx, dy) matrices r1 - r2 over site pairs, minimal image in
        wrapped directions."""
        xs, ys = self.site_coords()
        dx = xs[:, None] - xs[None, :]
        dy = ys[:, None] - ys[None, :]
        if self.wraps_x:
            L = self.width_x
            dx = (dx + L // 2) % L - L // 2
        if self.wraps_y:
            L = self.height_y
            dy = (dy + L // 2) % L - L // 2
        return dx, dy

    def distances(self):
        dx, dy = self.displacements()
        return np.hypot(dx, dy)


@dataclass(frozen=True)
class ModelSpec:
    """Hofstadter-family model: rational flux, hopping, diagonal disorder."""

    flux_numerator: int
    flux_denominator: int
    hopping_amplitude: float = 1.0
    disorder_amplitude: float = 0.0
    disorder_seed: int = 0
    hopping_range: int = 1
    decay_rate_mu0: float = 0.5

    def __post_init__(self):
        if self.flux_denominator <= 0:
            raise ValueError("flux denominator must be a positive integer")
        if self.disorder_amplitude < 0:
            raise ValueError("disorder amplitude must be >= 0")
        if self.hopping_range < 1:
            raise ValueError("hopping range must be >= 1")
        if self.decay_rate_mu0 <= 0:
            raise ValueError("decay rate mu0 must be > 0")
        g = gcd(self.flux_numerator, self.flux_denominator)
        if g > 1:
            object.__setattr__(self, "flux_numerator", self.flux_numerator // g)
            object.__setattr__(self, "flux_denominator", self.flux_denominator // g)

    @property
    def flux(self):
        return self.flux_numerator / self.flux_denominator


@dataclass(frozen=True)
class HermitianLatticeOperator:
    """Dense Hermitian matrix over the sites of a lattice window."""

    geometry: LatticeGeometry
    matrix: np.ndarray

    def __post_init__(self):
        m = self.matrix
        if m.shape != (self.geometry.n_sites, self.geometry.n_sites):
            raise DimensionMismatch(
                f"matrix shape {m.shape} does not match {self.geometry.n_sites} sites"
            )
        m.flags.writeable = False

    @property
    def n(self):
        return self.matrix.shape[0]

    def is_exactly_hermitian(self):
        return np.array_equal(self.matrix, self.matrix.conj().T)

    def with_matrix(self, matrix):
        return HermitianLatticeOperator(self.geometry, np.ascontiguousarray(matrix))


@dataclass(frozen=True)
class EdgeTerm:
    """E = J H - H_B J mapping half-plane sites into the bulk window.

    For the Dirichlet restriction this is -H_B(r, r') for rows with y < 0
    and zero otherwise.  ``decay_constant`` is the fitted rate kappa of the
    row-sum bound sum_r' |E(r, r')| <= C exp(-kappa |y|); with a single
    populated |y| bin (finite hopping range 1) the fit degenerates and the
    rate is reported as +inf.
    """

    bulk_geometry: LatticeGeometry
    half_geometry: LatticeGeometry
    entries: np.ndarray
    decay_constant: float
    bound_prefactor: float

    def row_sums(self):
        return np.abs(self.entries).sum(axis=1)

    def prefactor_for(self, rate):
        """Smallest C with sum_r' |E(r, r')| <= C exp(-rate |y|) on this window."""
        _, ys = self.bulk_geometry.site_coords()
        sums = self.row_sums()
        nz = sums > 0
        if not nz.any():
            return 0.0
        return float(np.max(sums[nz] * np.exp(rate * np.abs(ys[nz]))))


@dataclass(frozen=True)
class LocalityReport:
    mu0: float
    sup_row_sum: float
    cap: float
    passes: bool


@dataclass(frozen=True)
class GapReport:
    mu: float
    lower: float
    upper: float

    @property
    def width(self):
        return self.upper - self.lower


def build_bulk_hamiltonian(spec, geom, dtype=np.complex128):
    """Hofstadter Hamiltonian on a bulk window; exactly Hermitian.

    Hopping -t along x; hopping -t * exp(2*pi*i*(p/q)*x) along +y (Landau
    gauge).  Diagonal disorder is i.i.d. uniform on [-W, W] drawn from
    ``spec.disorder_seed``; identical inputs give bit-identical matrices.
    """
    if geom.domain_kind != "bulk_plane":
        raise ValueError("bulk Hamiltonian requires a bulk_plane geometry")
    if geom.width_x < 2 or geom.height_y < 2:
        raise ValueError("geometry must be at least 2x2")
    if geom.wraps_x and geom.width_x % spec.flux_denominator != 0:
        raise ValueError(
            f"periodic width {geom.width_x} incommensurate with flux denominator "
            f"{spec.flux_denominator}"
        )
    n = geom.n_sites
    ny = geom.height_y
    t = spec.hopping_amplitude
    alpha = spec.flux
    H = np.zeros((n, n), dtype=dtype)
    xs = np.arange(geom.x0, geom.x0 + geom.width_x)
    for ix, x in enumerate(xs):
        col = ix * ny
        # +x hops
        jx = ix + 1
        if jx == geom.width_x and geom.wraps_x:
            jx = 0
        if jx < geom.width_x:
            rows = np.arange(ny)
            H[col + rows, jx * ny + rows] += -t
            H[jx * ny + rows, col + rows] += -t
        # +y hops, phase depends on x only
        ph = -t * np.exp(2j * np.pi * alpha * x)
        rows = np.arange(ny - 1)
        H[col + rows, col + rows + 1] += ph
        H[col + rows + 1, col + rows] += np.conj(ph)
        if geom.wraps_y:
            H[col + ny - 1, col] += ph
            H[col, col + ny - 1] += np.conj(ph)
    if spec.disorder_amplitude > 0:
        rng = np.random.default_rng(spec.disorder_seed)
        w = spec.disorder_amplitude
        H[np.diag_indices(n)] += rng.uniform(-w, w, size=n)
    return HermitianLatticeOperator(geom, H)


def restrict_half_plane(bulk_op):
    """Dirichlet restriction of a bulk window to its y >= 0 sites.

    Returns the half-plane operator H and the edge term E = J H - H_B J,
    which for Dirichlet conditions equals -H_B(r, r') on rows with y < 0 and
    vanishes on y >= 0.  The fitted (C, kappa) of the exponential row-sum
    bound are attached to the edge term.
    """
    geom = bulk_op.geometry
    if geom.domain_kind != "bulk_plane":
        raise ValueError("restriction starts from a bulk_plane window")
    if geom.wraps_y:
        raise ValueError("restriction of a torus window is not meaningful; use open x")
    xs, ys = geom.site_coords()
    keep = ys >= 0
    if not (~keep).any():
        raise ValueError("bulk window has no y < 0 rows; edge term would be vacuous")
    if not keep.any():
        raise ValueError("bulk window has no y >= 0 rows to keep")
    n_keep_rows = int((np.arange(geom.y0, geom.y0 + geom.height_y) >= 0).sum())
    half_geom = LatticeGeometry(
        width_x=geom.width_x,
        height_y=n_keep_rows,
        x_boundary=geom.x_boundary,
        domain_kind="half_plane",
        origin_offset=(geom.origin_offset[0], 0),
    )
    Hb = bulk_op.matrix
    H = np.ascontiguousarray(Hb[np.ix_(keep, keep)])
    half_op = HermitianLatticeOperator(half_geom, H)

    entries = np.zeros((geom.n_sites, half_geom.n_sites), dtype=Hb.dtype)
    below = ~keep
    entries[below, :] = -Hb[np.ix_(below, keep)]
    C, kappa = _fit_edge_bound(entries, ys)
    edge = EdgeTerm(geom, half_geom, entries, decay_constant=kappa, bound_prefactor=C)
    return half_op, edge


def _fit_edge_bound(entries, ys_bulk):
    """Fit sum_r' |E(r,r')| <= C exp(-kappa |y|) over populated |y| bins.

    A single populated bin (finite hopping range 1) cannot pin a rate; the
    rate is then +inf and C covers the bin at rate zero.
    """
    sums = np.abs(entries).sum(axis=1)
    ay = np.abs(ys_bulk)
    bins = {}
    for a, s in zip(ay, sums):
        if s > 0:
            bins[int(a)] = max(bins.get(int(a), 0.0), float(s))
    if not bins:
        return 0.0, np.inf
    if len(bins) == 1:
        ((_, s),) = bins.items()
        return s, np.inf
    a_vals = np.array(sorted(bins))
    s_vals = np.array([bins[int(a)] for a in a_vals])
    slope, intercept = np.polyfit(a_vals, np.log(s_vals), 1)
    kappa = -slope
    # bound must actually hold: inflate C to cover every bin
    C = max(float(np.exp(intercept)), float(np.max(s_vals * np.exp(kappa * a_vals))))
    return C, float(kappa)


def verify_locality(op, mu0, cap=1e6):
    """Short-range check: sup over rows of sum_j |H_ij| (e^(mu0 |ri-rj|) - 1).

    Always finite on a window; ``passes`` compares against ``cap``.
    Distances use the minimal image in wrapped directions.
    """
    if mu0 <= 0:
        raise ValueError("mu0 must be > 0")
    dist = op.geometry.distances()
    weights = np.expm1(mu0 * dist)
    row = (np.abs(op.matrix) * weights).sum(axis=1)
    sup = float(row.max())
    return LocalityReport(mu0=mu0, sup_row_sum=sup, cap=cap, passes=bool(sup < cap))


def spectral_gap(op, mu, tol=1e-9, eigenvalues=None):
    """Maximal open interval around mu free of spectrum on the truncation.

    Raises GapClosed when an eigenvalue sits within ``tol`` of mu.  The
    returned interval may be half-infinite when mu lies outside the
    truncated spectrum.
    """
    w = np.linalg.eigvalsh(op.matrix) if eigenvalues is None else np.asarray(eigenvalues)
    if np.min(np.abs(w - mu)) < tol:
        raise GapClosed(f"spectrum within {tol} of mu={mu}")
    below = w[w < mu]
    above = w[w > mu]
    lower = float(below.max()) if below.size else -np.inf
    upper = float(above.min()) if above.size else np.inf
    if upper - lower < tol:
        raise GapClosed(f"gap narrower than {tol} at mu={mu}")
    return GapReport(mu=float(mu), lower=lower, upper=upper)
