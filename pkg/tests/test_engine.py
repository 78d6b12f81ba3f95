import math

import numpy as np
import pytest

from shgoints import engine, mmd
from shgoints.angular import AngularKey
from shgoints.boys import boys
from shgoints.harmonics import real_solid_harmonics
from shgoints.io_model import build_shells, read_basis, read_molecule

from helpers import DATA, block_close, mixed_close, random_shell


def test_gaussian_product_examples():
    a = np.array([0.1, 0.2, 0.3])
    pr = engine.gaussian_product(0.7, a, 1.9, a)
    np.testing.assert_allclose(pr.composite_center, a)
    assert pr.prefactor == 1.0 and pr.zeta == pytest.approx(2.6)
    b = np.array([1.0, -1.0, 2.0])
    assert np.allclose(engine.gaussian_product(1.3, a, 1.3, b).composite_center, (a + b) / 2)
    pr = engine.gaussian_product(1.2, [0, 0, 0], 0.8, [0, 0, 2.0])
    assert pr.prefactor == pytest.approx(math.exp(-0.48 * 4))
    assert 0 < pr.prefactor <= 1
    with pytest.raises(ValueError):
        engine.gaussian_product(0.0, a, 1.0, b)


def test_single_center_pair_integral():
    assert engine.single_center_pair_integral((0, 0), (0, 0), 1.3) == pytest.approx((math.pi / 1.3) ** 1.5)
    assert engine.single_center_pair_integral(AngularKey(1, 0), AngularKey(2, 0), 1.0) == 0.0
    assert engine.single_center_pair_integral((2, 1), (2, -1), 1.0) == 0.0


def test_single_center_pair_integral_quadrature():
    # |Y^2_1|^2 exp(-zeta r^2) on a product grid: Gauss-Laguerre-free radial via scipy quad
    from scipy.integrate import quad

    from shgoints.harmonics import solid_harmonic

    zeta = 1.7
    radial = quad(lambda r: r ** 6 * math.exp(-zeta * r * r), 0, np.inf, epsabs=1e-15)[0]
    ct, wt = np.polynomial.legendre.leggauss(40)
    phi = np.linspace(0, 2 * math.pi, 40, endpoint=False)
    st = np.sqrt(1 - ct ** 2)
    pts = np.stack([st[:, None] * np.cos(phi), st[:, None] * np.sin(phi),
                    np.broadcast_to(ct[:, None], (40, 40))], axis=-1)
    ang = np.abs(solid_harmonic((2, 1), pts)) ** 2
    angular = float(np.einsum("ij,i->", ang, wt)) * 2 * math.pi / 40
    ref = radial * angular
    assert engine.single_center_pair_integral((2, 1), (2, 1), zeta) == pytest.approx(ref, abs=1e-10)


def test_normalization():
    A = engine.make_shell(0, [0, 0, 0], [0.8])
    assert engine.overlap(A, A)[0, 0] == pytest.approx(1.0, abs=1e-14)
    for l in range(7):
        A = engine.make_shell(l, [0.1, 0.2, 0.3], [3.0, 0.9, 0.2], [0.3, 0.5, 0.4])
        np.testing.assert_allclose(engine.overlap(A, A), np.eye(2 * l + 1), atol=1e-14)


def test_overlap_ss_closed_form():
    A = engine.make_shell(0, [0, 0, 0], [1.2], normalize=False)
    B = engine.make_shell(0, [0.3, -0.4, 1.1], [0.8], normalize=False)
    d2 = 0.09 + 0.16 + 1.21
    assert engine.overlap(A, B)[0, 0] == pytest.approx((math.pi / 2.0) ** 1.5 * math.exp(-0.48 * d2), rel=1e-14)


def test_orthonormality_collapse_same_center(rng):
    c = rng.normal(size=3)
    for la in range(7):
        for lb in range(7):
            A = engine.make_shell(la, c, [1.3])
            B = engine.make_shell(lb, c, [0.6])
            S = engine.overlap(A, B)
            if la != lb:
                assert np.abs(S).max() < 1e-12
            else:
                off = S - np.diag(np.diag(S))
                assert np.abs(off).max() < 1e-12
                assert np.allclose(np.diag(S), np.diag(S)[0], atol=1e-13)


def test_overlap_vs_oracle(rng):
    for _ in range(40):
        A = random_shell(rng, 4, 2)
        B = random_shell(rng, 4, 2)
        assert block_close(engine.overlap(A, B), mmd.solid_overlap(A, B), 1e-11)


def test_nuclear_ss_examples():
    A = engine.make_shell(0, [0, 0, 0], [1.2], normalize=False)
    B = engine.make_shell(0, [0, 0, 2.0], [0.8], normalize=False)
    P = np.array([0, 0, 0.8])
    K = math.exp(-0.48 * 4)
    assert engine.nuclear_attraction(A, B, P, 1.0)[0, 0] == pytest.approx(-2 * math.pi / 2.0 * K, rel=1e-14)
    c = np.array([0.5, -0.3, 0.2])
    ref = -2 * math.pi / 2.0 * K * boys(0, 2.0 * np.sum((P - c) ** 2))
    assert engine.nuclear_attraction(A, B, c, 1.0)[0, 0] == pytest.approx(ref, rel=1e-14)
    assert engine.nuclear_attraction(A, B, c, 3.0)[0, 0] == pytest.approx(3 * ref, rel=1e-14)


def test_nuclear_vs_oracle(rng):
    for _ in range(40):
        A = random_shell(rng, 4, 2)
        B = random_shell(rng, 4, 2)
        nuc = [(rng.uniform(-2, 2, 3), float(rng.integers(1, 9)))]
        assert mixed_close(engine.nuclear_attraction(A, B, nuclei=nuc), mmd.solid_nuclear(A, B, nuc),
                           1e-10, 1e-13)


def test_nuclear_at_composite_center_high_l():
    # |c - P| = 0: only the L = 0 piece survives
    A = engine.make_shell(3, [0, 0, 0], [1.0])
    B = engine.make_shell(2, [0, 0, 1.0], [1.0])
    c = np.array([0, 0, 0.5])
    assert mixed_close(engine.nuclear_attraction(A, B, c), mmd.solid_nuclear(A, B, [(c, 1.0)]), 1e-11, 1e-13)


def test_eri_ssss_closed_form():
    a, b, d, g = 1.1, 0.7, 0.9, 1.3
    A = engine.make_shell(0, [0, 0, 0], [a], normalize=False)
    B = engine.make_shell(0, [0, 0, 0], [b], normalize=False)
    C = engine.make_shell(0, [0, 1.0, 0.5], [d], normalize=False)
    D = engine.make_shell(0, [0, 1.0, 0.5], [g], normalize=False)
    p, q = a + b, d + g
    rho = p * q / (p + q)
    ref = 2 * math.pi ** 2.5 / (p * q * math.sqrt(p + q)) * boys(0, rho * 1.25)
    assert engine.eri(A, B, C, D)[0, 0, 0, 0] == pytest.approx(ref, rel=1e-14)
    assert mmd.solid_eri(A, B, C, D)[0, 0, 0, 0] == pytest.approx(ref, rel=1e-14)


def test_eri_vs_oracle(rng):
    for _ in range(12):
        shells = [random_shell(rng, 3, int(rng.integers(1, 3))) for _ in range(4)]
        assert mixed_close(engine.eri(*shells), mmd.solid_eri(*shells), 1e-9, 1e-12)


def test_eri_coincident_centers(rng):
    c = rng.normal(size=3)
    shells = [engine.make_shell(l, c, [e]) for l, e in ((2, 1.0), (1, 0.7), (3, 1.4), (0, 0.5))]
    assert mixed_close(engine.eri(*shells), mmd.solid_eri(*shells), 1e-9, 1e-12)


def test_eri_exchange_symmetry(rng):
    A, B, C, D = (random_shell(rng, 2, 1) for _ in range(4))
    g = engine.eri(A, B, C, D)
    np.testing.assert_allclose(engine.eri(B, A, C, D), g.transpose(1, 0, 2, 3), atol=1e-11)
    np.testing.assert_allclose(engine.eri(A, B, D, C), g.transpose(0, 1, 3, 2), atol=1e-11)
    np.testing.assert_allclose(engine.eri(C, D, A, B), g.transpose(2, 3, 0, 1), atol=1e-11)


@pytest.fixture(scope="module")
def water():
    mol = read_molecule(DATA / "h2o.xyz")
    return mol, build_shells(mol, read_basis(DATA / "toy-spdf.basis"))


def test_compute_matrix_basics():
    s = engine.make_shell(0, [0, 0, 0], [0.5])
    t = engine.compute_matrix("overlap", [s])
    assert t.data.shape == (1, 1) and t.data[0, 0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        engine.compute_matrix("overlap", [])
    with pytest.raises(ValueError):
        engine.compute_matrix("nuclear", [s])
    with pytest.raises(ValueError):
        engine.compute_matrix("kinetic", [s])


def test_water_matrices_vs_oracle(water):
    mol, shells = water
    for kind in ("overlap", "nuclear"):
        t = engine.compute_matrix(kind, shells, mol.nuclei())
        ref = mmd.compute_matrix(kind, shells, mol.nuclei())
        assert np.abs(t.data - ref).max() <= 1e-10
        assert np.abs(t.data - t.data.T).max() <= 1e-12
    S = engine.compute_matrix("overlap", shells).data
    assert np.linalg.eigvalsh(S).min() > 0


def test_threads_do_not_change_results(water):
    mol, shells = water
    a = engine.compute_matrix("nuclear", shells, mol.nuclei(), threads=1).data
    b = engine.compute_matrix("nuclear", shells, mol.nuclei(), threads=3).data
    assert np.array_equal(a, b)


def test_eri_tensor_small():
    s = engine.make_shell(0, [0, 0, 0], [0.5])
    t = engine.compute_eri_tensor([s])
    assert t.dims == (1, 1, 1, 1) and t.data[0, 0, 0, 0] > 0


def test_eri_tensor_symmetry_and_oracle(rng):
    shells = [random_shell(rng, 2, 1, 0.3, 3.0) for _ in range(3)]
    sym = engine.compute_eri_tensor(shells).data
    full = engine.compute_eri_tensor(shells, use_symmetry=False).data
    for perm in [(1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0)]:
        assert np.array_equal(sym, sym.transpose(perm))
    assert np.abs(full - full.transpose(2, 3, 0, 1)).max() <= 1e-11
    assert np.abs(sym - full).max() <= 1e-11
    ref = mmd.compute_eri_tensor(shells)
    assert mixed_close(sym, ref, 1e-9, 1e-12)
    n = sym.shape[0]
    assert all(sym[i, i, i, i] > 0 for i in range(n))
    threaded = engine.compute_eri_tensor(shells, threads=2).data
    assert np.array_equal(threaded, sym)


def test_translational_invariance(rng):
    for _ in range(5):
        A, B = random_shell(rng, 4, 2), random_shell(rng, 4, 2)
        c = rng.normal(size=3)
        shift = rng.uniform(-4, 4, 3)
        A2 = engine.make_shell(A.l, A.center + shift, A.exponents, A.contraction)
        B2 = engine.make_shell(B.l, B.center + shift, B.exponents, B.contraction)
        for f1, f2 in (
            (engine.overlap(A, B), engine.overlap(A2, B2)),
            (engine.nuclear_attraction(A, B, c), engine.nuclear_attraction(A2, B2, c + shift)),
        ):
            assert mixed_close(f2, f1, 1e-12, 1e-14)


def _real_wigner_d(l, R, rng):
    """Numerical D with S(R r) = D S(r) for real solid harmonics, fitted on random points."""
    pts = rng.normal(size=(4 * l + 8, 3))
    Y = real_solid_harmonics(l, pts)
    Yr = real_solid_harmonics(l, pts @ R.T)
    D, *_ = np.linalg.lstsq(Y, Yr, rcond=None)
    return D.T


def test_rotational_covariance(rng):
    from scipy.spatial.transform import Rotation

    R = Rotation.random(random_state=7).as_matrix()
    A, B = random_shell(rng, 2, 1, l=2), random_shell(rng, 2, 1, l=1)
    c = rng.normal(size=3)
    Ar = engine.make_shell(A.l, R @ A.center, A.exponents, A.contraction)
    Br = engine.make_shell(B.l, R @ B.center, B.exponents, B.contraction)
    # phi'(r) = phi(R^T r) so the rotated block is D^-T S D^-1 with D orthogonal
    Da, Db = _real_wigner_d(A.l, R, rng), _real_wigner_d(B.l, R, rng)
    V = engine.nuclear_attraction(A, B, c)
    Vr = engine.nuclear_attraction(Ar, Br, R @ c)
    np.testing.assert_allclose(Vr, Da @ V @ Db.T, atol=1e-10)
    S = engine.overlap(A, B)
    np.testing.assert_allclose(engine.overlap(Ar, Br), Da @ S @ Db.T, atol=1e-10)


def test_screening_metadata():
    A = engine.make_shell(1, [0, 0, 0], [40.0])
    B = engine.make_shell(1, [0, 0, 8.0], [40.0])
    assert np.all(engine.overlap(A, B) == 0.0)
    t = engine.compute_matrix("overlap", [A, B], screening=False)
    assert t.metadata["screening"] is False and t.metadata["screen_threshold"] == 0.0
    t = engine.compute_matrix("overlap", [A, B])
    assert t.metadata["screen_threshold"] == engine.SCREEN_THRESHOLD


def test_shell_validation():
    with pytest.raises(ValueError):
        engine.make_shell(0, [0, 0, 0], [-1.0])
    with pytest.raises(ValueError):
        engine.PrimitiveShell(0, [0, 0, 0], [1.0, 2.0], [1.0], [1.0])
    with pytest.raises(ValueError):
        engine.PrimitiveShell(0, [np.nan, 0, 0], [1.0], [1.0], [1.0])


def test_degenerate_geometry_matches_oracle():
    # nucleus exactly on P, and all four shells on one center so P = Q
    c = np.array([0.3, -0.2, 0.5])
    for la, lb in [(1, 1), (2, 1), (2, 2), (3, 2)]:
        A = engine.make_shell(la, c, [1.1, 0.4], [0.5, 0.6])
        B = engine.make_shell(lb, c, [0.7])
        v = engine.nuclear_attraction(A, B, c, 2.0)
        ref = mmd.solid_nuclear(A, B, [(c, 2.0)])
        if (la + lb) % 2:  # odd parity on one center: the exact block is zero
            assert np.abs(v).max() < 1e-14
        else:
            assert block_close(v, ref, 1e-12)
    shells = [engine.make_shell(l, c, [0.9, 0.3], [0.4, 0.7]) for l in (2, 1, 1, 0)]
    assert block_close(engine.eri(*shells), mmd.solid_eri(*shells), 1e-12)


def test_harmonics_vanish_at_origin():
    from shgoints.harmonics import solid_harmonics_table
    Y = solid_harmonics_table(6, np.zeros(3))
    assert Y[0] == 1.0 and np.all(Y[1:] == 0.0)
