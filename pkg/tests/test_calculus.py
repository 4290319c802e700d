import numpy as np
import pytest

from bulkedge.calculus import (
    combes_thomas_check,
    decay_profile,
    decompose,
    fermi_projection,
    hs_matrix_function,
    matrix_function,
)
from bulkedge.errors import ConditionUnsatisfied, GapClosed, InsufficientRange
from bulkedge.lattice import (
    HermitianLatticeOperator,
    LatticeGeometry,
    ModelSpec,
    build_bulk_hamiltonian,
    restrict_half_plane,
)
from bulkedge.switching import SwitchFunction

THIRD = ModelSpec(1, 3)


def torus(L):
    return LatticeGeometry(L, L, x_boundary="periodic")


@pytest.fixture(scope="module")
def hof24():
    op = build_bulk_hamiltonian(THIRD, torus(24))
    dec = decompose(op)
    return op, dec


def gap_mu(dec, k, q=3):
    w = dec.eigenvalues
    n = w.size
    return 0.5 * (w[k * n // q - 1] + w[k * n // q])


def test_fermi_projection_two_level():
    geom = LatticeGeometry(2, 1)
    op = HermitianLatticeOperator(geom, np.diag([-1.0, 1.0]).astype(complex))
    P = fermi_projection(op, 0.0).matrix
    np.testing.assert_allclose(P, np.diag([1.0, 0.0]), atol=1e-14)


def test_fermi_projection_band_counting(hof24):
    op, dec = hof24
    # oracle: each of the three bands holds exactly N/3 states
    P1 = fermi_projection(op, gap_mu(dec, 1), decomposition=dec)
    assert np.trace(P1.matrix).real == pytest.approx(op.n / 3, abs=1e-8)
    P2 = fermi_projection(op, gap_mu(dec, 2), decomposition=dec)
    assert np.trace(P2.matrix).real == pytest.approx(2 * op.n / 3, abs=1e-8)


def test_fermi_projection_laws(hof24):
    op, dec = hof24
    P = fermi_projection(op, gap_mu(dec, 1), decomposition=dec).matrix
    assert np.linalg.norm(P @ P - P, 2) < 1e-10
    assert np.linalg.norm(P - P.conj().T, 2) == 0.0


def test_fermi_projection_gap_closed(hof24):
    op, dec = hof24
    inside_band = float(dec.eigenvalues[10])
    with pytest.raises(GapClosed):
        fermi_projection(op, inside_band, decomposition=dec)


def test_matrix_function_constant_one(hof24):
    op, dec = hof24
    w = dec.eigenvalues
    g = SwitchFunction((w[-1] + 1.0, w[-1] + 2.0))  # g == 1 on the spectrum
    M = matrix_function(op, g, decomposition=dec).matrix
    np.testing.assert_allclose(M, np.eye(op.n), atol=1e-12)


def test_matrix_function_equals_projection_in_gap(hof24):
    op, dec = hof24
    mu = gap_mu(dec, 1)
    w = dec.eigenvalues
    lo = w[w < mu].max() + 0.05
    hi = w[w > mu].min() - 0.05
    g = SwitchFunction((lo, hi))
    P = fermi_projection(op, mu, decomposition=dec).matrix
    G = matrix_function(op, g, decomposition=dec).matrix
    assert np.linalg.norm(G - P, 2) < 1e-10


def test_matrix_function_polynomial_homomorphism(hof24):
    op, dec = hof24
    H = op.matrix
    M = matrix_function(op, lambda lam: lam**3 - 2 * lam, decomposition=dec).matrix
    direct = H @ H @ H - 2 * H
    assert np.linalg.norm(M - direct, 2) < 1e-10 * np.linalg.norm(direct, 2)


def test_half_plane_switch_sees_edge_spectrum(hof24):
    op, dec = hof24
    mu = gap_mu(dec, 1)
    w = dec.eigenvalues
    lo = w[w < mu].max() + 0.05
    hi = w[w > mu].min() - 0.05
    geom = LatticeGeometry(24, 13, origin_offset=(0, 1))
    half, _ = restrict_half_plane(build_bulk_hamiltonian(THIRD, geom))
    g = SwitchFunction((lo, hi))
    G = matrix_function(half, g).matrix
    evals = np.linalg.eigvalsh(G)
    assert evals.min() > -1e-12 and evals.max() < 1.0 + 1e-12
    # oracle: edge spectrum inside the bulk gap forces strictly interior values
    wh = np.linalg.eigvalsh(half.matrix)
    assert np.any((wh > lo) & (wh < hi))
    assert np.any((evals > 0.01) & (evals < 0.99))


def test_hs_scalar():
    geom = LatticeGeometry(1, 1)
    g = SwitchFunction((-0.5, 0.5))
    for a in (0.3, -0.2, 0.9):
        op = HermitianLatticeOperator(geom, np.array([[complex(a)]]))
        got, delta = hs_matrix_function(op, g, tol=1e-6)
        assert abs(got.matrix[0, 0] - g(np.array([a]))[0]) < 1e-6


def test_hs_two_level():
    geom = LatticeGeometry(2, 1)
    op = HermitianLatticeOperator(geom, np.diag([-1.0, 1.0]).astype(complex))
    g = SwitchFunction((-0.5, 0.5))
    got, _ = hs_matrix_function(op, g, tol=1e-6)
    np.testing.assert_allclose(got.matrix, np.diag([1.0, 0.0]), atol=1e-6)


@pytest.mark.slow
def test_hs_matches_eigendecomposition_hofstadter():
    op = build_bulk_hamiltonian(THIRD, torus(12))
    dec = decompose(op)
    w = dec.eigenvalues
    n = w.size
    mu = 0.5 * (w[n // 3 - 1] + w[n // 3])
    lo = w[w < mu].max() + 0.1
    hi = w[w > mu].min() - 0.1
    g = SwitchFunction((lo, hi))
    ref = matrix_function(op, g, decomposition=dec).matrix
    got, delta = hs_matrix_function(op, g, tol=1e-6)
    assert np.max(np.abs(got.matrix - ref)) < 1e-5


def test_decay_identity_matrix():
    geom = LatticeGeometry(8, 8)
    op = HermitianLatticeOperator(geom, np.eye(64, dtype=complex))
    prof = decay_profile(op)
    assert np.all(prof.max_abs_kernel[prof.distance_bins > 0] == 0.0)


def test_decay_gapped_projection_exponential(hof24):
    op, dec = hof24
    P = fermi_projection(op, gap_mu(dec, 1), decomposition=dec)
    prof = decay_profile(P)
    assert prof.exp_rate > 0.3
    # direct kernel measurement at two separations confirms the trend
    d = op.geometry.distances()
    m5 = np.max(np.abs(P.matrix[(d > 4.5) & (d < 5.5)]))
    m10 = np.max(np.abs(P.matrix[(d > 9.5) & (d < 10.5)]))
    assert m10 < m5 * np.exp(-prof.exp_rate * 2)


def test_decay_in_gap_function_decays_in_y(hof24):
    op, dec = hof24
    mu = gap_mu(dec, 1)
    w = dec.eigenvalues
    lo = w[w < mu].max() + 0.05
    hi = w[w > mu].min() - 0.05
    geom = LatticeGeometry(24, 17, origin_offset=(0, 1))
    half, _ = restrict_half_plane(build_bulk_hamiltonian(THIRD, geom))
    # G supported inside the gap: g(1 - g) vanishes off the gap
    g = SwitchFunction((lo, hi))
    dech = decompose(half)
    # window's artificial top edge repopulates large-y bins; cap the fit
    G = matrix_function(half, lambda lam: g(lam) * (1 - g(lam)), decomposition=dech)
    prof = decay_profile(G, weight="exponential_in_y1plusy2", fit_upper=16)
    assert prof.exp_rate > 0.2
    profm = decay_profile(G, weight="exponential_in_y", fit_upper=8)
    assert profm.exp_rate > 0.2


def test_decay_insufficient_range():
    geom = LatticeGeometry(2, 2)
    op = HermitianLatticeOperator(geom, np.eye(4, dtype=complex))
    with pytest.raises(InsufficientRange):
        decay_profile(op)


def test_ct_far_from_spectrum():
    from bulkedge.calculus import suggest_ct_rate_factor

    op = build_bulk_hamiltonian(ModelSpec(0, 1), LatticeGeometry(8, 8))
    w = np.linalg.eigvalsh(op.matrix)
    z = complex(w[-1] + 10 * (w[-1] - w[0]), 0.0)
    c = suggest_ct_rate_factor(op, z)
    rep = combes_thomas_check(op, z, c=c)
    assert rep.passes and rep.worst_ratio <= 1.0
    assert rep.mu > 0.5  # far z admits a healthy decay rate


def test_ct_in_gap_center(hof24):
    from bulkedge.calculus import suggest_ct_rate_factor

    op, dec = hof24
    mu = gap_mu(dec, 1)
    z = mu + 0.5j
    c = suggest_ct_rate_factor(op, z, eigenvalues=dec.eigenvalues)
    rep = combes_thomas_check(op, z, c=c, eigenvalues=dec.eigenvalues)
    assert rep.passes


def test_ct_real_gap_energy(hof24):
    from bulkedge.calculus import suggest_ct_rate_factor

    op, dec = hof24
    mu = gap_mu(dec, 1)
    z = complex(mu)
    c = suggest_ct_rate_factor(op, z, eigenvalues=dec.eigenvalues)
    rep = combes_thomas_check(op, z, c=c, eigenvalues=dec.eigenvalues)
    assert rep.passes


def test_ct_condition_unsatisfied(hof24):
    op, dec = hof24
    mu = gap_mu(dec, 1)
    with pytest.raises(ConditionUnsatisfied):
        combes_thomas_check(op, complex(mu), c=5.0, eigenvalues=dec.eigenvalues)
