import numpy as np
import pytest

from . import TOL
from app.decompose import (
    DECOMPOSABLE,
    FoldSide,
    IsoKind,
    chol_complex_symmetric,
    complex_perplectic_image,
    conjugate_symplectic_svd,
    csd,
    decompose,
    fold,
    hcsd,
    hsvd,
    hyperbolic_eigen,
    iso_matrix,
    nonsquare_svd,
    odo,
    perplectic_svd,
    structure_isomorphism,
    svd_factor,
    sympl_svd,
    takagi,
    uso_factor,
    williamson,
)
from app.errors import (
    NoDecomposition,
    NotInGroup,
    NotSPD,
    NotSymmetric,
    PivotBreakdown,
    ShapeMismatch,
    Singular,
    UnsupportedField,
)
from app.groups import (
    bilinear_residual,
    gl_group,
    indefinite_group,
    membership_residual,
    orthogonal_group,
    sample_group,
    symplectic_group,
    unitary_group,
)
from app.numeric import (
    DenseMatrix,
    FieldTag,
    TransposeKind,
    complexify,
    conj_transpose,
    diagonal,
    exchange_matrix,
    identity,
    signature_matrix,
    symplectic_form,
)
from app.registry import identity_element, params_for_size, sample_factored, spec
from app.service import harness_service

R, C, H = FieldTag.R, FieldTag.C, FieldTag.H


def assert_factored(fe, tol=TOL):
    """Reconstrução e pertinência de todos os fatores."""
    scale = max(1.0, fe.g.norm())
    assert (fe.reconstruction() - fe.g).norm() < tol * scale
    for groups, raw in ((fe.spec.k1.groups, fe.k1_raw), (fe.spec.k2.groups, fe.k2_raw)):
        for group, m in zip(groups, raw):
            assert membership_residual(group, m) < tol * max(1, group.size)
    assert fe.theta.violations() == 0


# ============================================================
# F7: SVD
# ============================================================


@pytest.mark.parametrize("fld", list(FieldTag))
def test_svd_of_identity(fld):
    fe = svd_factor(identity(3, fld), fld.beta)
    assert np.allclose(fe.theta.as_array(), 0.0)
    assert_factored(fe)


def test_svd_of_diagonal():
    fe = svd_factor(diagonal([3.0, 2.0]), 1)
    assert np.allclose(np.exp(fe.theta.as_array()), [3.0, 2.0])
    assert np.allclose(np.abs(fe.k1_raw[0].data), np.eye(2))
    assert_factored(fe)


def test_quaternion_svd_matches_complexified_values(rng):
    g = sample_group(gl_group(2, H), rng, 1.0)
    fe = svd_factor(g, 4)
    oracle = np.linalg.svd(complexify(g).data, compute_uv=False)
    assert np.allclose(np.exp(fe.theta.as_array()), oracle[::2])
    assert_factored(fe)


def test_svd_singular():
    with pytest.raises(Singular):
        svd_factor(DenseMatrix(R, np.ones((2, 2))), 1)


# ============================================================
# F1: ODO
# ============================================================


def test_odo_of_diagonal_unitary():
    theta = np.array([0.3, 1.1])
    u = diagonal(np.exp(1j * theta))
    fe = odo(u)
    assert np.allclose(fe.theta.as_array(), [1.1, 0.3])
    assert_factored(fe)


def test_odo_of_real_orthogonal(rng):
    u = sample_group(unitary_group(3, R), rng).promote(C)
    fe = odo(u)
    assert np.all(fe.theta.as_array() < 1e-8)
    assert np.linalg.norm((fe.k1_raw[0] @ fe.k2_raw[0]).data - u.data) < TOL


def test_odo_angles_match_eigenvalues(rng):
    u = sample_group(unitary_group(4, C), rng, 1.0)
    fe = odo(u)
    oracle = np.mod(np.angle(np.linalg.eigvals(u.data.T @ u.data)) / 2, np.pi)
    assert np.allclose(np.sort(fe.theta.as_array()), np.sort(oracle))
    assert_factored(fe)


def test_odo_not_unitary():
    with pytest.raises(NotInGroup):
        odo(diagonal([2.0 + 0j, 1.0]))


# ============================================================
# F4: CSD
# ============================================================


def test_csd_of_identity():
    fe = csd(identity(4), 1, 2, 2, 2, 2)
    assert np.allclose(fe.theta.as_array(), 0.0)
    assert_factored(fe)


def test_csd_of_rotation():
    t = 0.4
    q = DenseMatrix(R, np.array([[np.cos(t), np.sin(t)], [-np.sin(t), np.cos(t)]]))
    fe = csd(q, 1, 1, 1, 1, 1)
    assert np.isclose(fe.theta.values[0], t)
    assert_factored(fe)


@pytest.mark.parametrize("beta", [1, 2])
@pytest.mark.parametrize("p, q, r, s", [(2, 2, 2, 2), (3, 1, 3, 1), (2, 2, 3, 1), (2, 2, 4, 0), (3, 2, 4, 1)])
def test_csd_recovers_angles(rng, beta, p, q, r, s):
    spec_ = spec("F4", beta, p=p, q=q, r=r, s=s)
    for _ in range(5):
        source = sample_factored(spec_, rng)
        fe = csd(source.g, beta, p, q, r, s)
        assert_factored(fe)
        assert np.allclose(fe.theta.canonical().values, source.theta.canonical().values, atol=1e-8)


def test_csd_quaternion_unsupported():
    with pytest.raises(UnsupportedField):
        csd(identity(2, H), 4, 1, 1, 1, 1)


# ============================================================
# F9: SVD hiperbólica
# ============================================================


def test_hsvd_of_identity():
    fe = hsvd(identity(3), 1, 2, 1)
    assert np.allclose(fe.theta.as_array(), 0.0)
    assert_factored(fe)


def test_hsvd_of_diagonal():
    fe = hsvd(diagonal([2.0, 3.0]), 1, 1, 1)
    assert np.allclose(np.exp(fe.theta.as_array()), [2.0, 3.0])
    assert np.allclose(np.abs(fe.k2_raw[0].data), np.eye(2))
    assert_factored(fe)


@pytest.mark.parametrize("beta", [1, 2])
def test_hsvd_values_are_invariant(rng, beta):
    fld = FieldTag.from_beta(beta)
    g = sample_group(gl_group(4, fld), rng, 1.0)
    w = sample_group(indefinite_group(2, 2, fld), rng, 0.5)
    first = hsvd(g, beta, 2, 2)
    second = hsvd(g @ w, beta, 2, 2)
    assert_factored(first)
    assert_factored(second)
    assert np.allclose(np.sort(first.theta.as_array()), np.sort(second.theta.as_array()), atol=TOL)


def test_hsvd_errors():
    with pytest.raises(UnsupportedField):
        hsvd(identity(2, H), 4, 1, 1)
    with pytest.raises(Singular):
        hsvd(DenseMatrix(R, np.ones((2, 2))), 1, 1, 1)


# ============================================================
# F10: SVD simplética
# ============================================================


def test_sympl_svd_of_identity():
    fe = sympl_svd(identity(2))
    assert np.allclose(fe.theta.as_array(), 0.0)
    assert_factored(fe)


def test_sympl_svd_of_scaled_identity():
    fe = sympl_svd(diagonal([2.0, 2.0]))
    assert np.allclose(np.exp(fe.theta.as_array()), [2.0])
    assert_factored(fe)


def test_sympl_svd_odd_dimension():
    with pytest.raises(ShapeMismatch):
        sympl_svd(identity(3))


# ============================================================
# TAKAGI, F13 E CHOLESKY
# ============================================================


def check_takagi(a, u, lam):
    assert np.linalg.norm(u.data @ np.diag(lam) @ u.data.T - a) < TOL * max(1.0, np.linalg.norm(a))
    assert np.linalg.norm(u.data.conj().T @ u.data - np.eye(len(lam))) < TOL


def test_takagi_of_identity():
    u, lam = takagi(identity(3, C))
    assert np.allclose(lam, 1.0)
    check_takagi(np.eye(3), u, lam)


def test_takagi_of_scalar_phase():
    phi, r = 1.3, 2.5
    a = np.array([[r * np.exp(1j * phi)]])
    u, lam = takagi(DenseMatrix(C, a))
    assert np.allclose(lam, [r])
    assert np.isclose(u.data[0, 0] ** 2, np.exp(1j * phi))


def test_takagi_values_are_singular_values(rng):
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    a = m + m.T
    u, lam = takagi(DenseMatrix(C, a))
    assert np.allclose(lam, np.linalg.svd(a, compute_uv=False))
    check_takagi(a, u, lam)


def test_takagi_degenerate_values(rng):
    v = sample_group(unitary_group(4, C), rng, 1.0).data
    a = v @ np.diag([2.0, 2.0, 1.0, 1.0]) @ v.T
    u, lam = takagi(DenseMatrix(C, a))
    assert np.allclose(lam, [2.0, 2.0, 1.0, 1.0])
    check_takagi(a, u, lam)


def test_takagi_real_indefinite():
    a = np.array([[1.0, 2.0], [2.0, -3.0]])
    u, lam = takagi(DenseMatrix(R, a))
    check_takagi(a, u, lam)


def test_takagi_not_symmetric():
    with pytest.raises(NotSymmetric):
        takagi(DenseMatrix(C, np.array([[1.0, 2.0], [0.0, 1.0]], dtype=complex)))


@pytest.mark.parametrize("scale", [1e-10, 1e-6, 1.0])
def test_takagi_is_scale_invariant(rng, scale):
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    a = scale * (m + m.T)
    u, lam = takagi(DenseMatrix(C, a))
    assert np.allclose(lam / scale, np.linalg.svd(a, compute_uv=False) / scale)
    assert np.linalg.norm(u.data @ np.diag(lam) @ u.data.T - a) < TOL * np.linalg.norm(a)
    assert np.linalg.norm(u.data.conj().T @ u.data - np.eye(4)) < TOL


def test_takagi_keeps_small_imaginary_part(rng):
    x, y = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
    a = (x + x.T) + 5e-9j * (y + y.T)
    u, lam = takagi(DenseMatrix(C, a))
    assert np.linalg.norm(u.data @ np.diag(lam) @ u.data.T - a) < TOL * np.linalg.norm(a)


def test_uso_of_scalar():
    fe = uso_factor(DenseMatrix(C, np.array([[1.0 + 1.0j]])))
    assert np.allclose(np.exp(fe.theta.as_array()), [np.sqrt(2.0)])
    assert np.isclose(fe.k1_raw[0].data[0, 0] ** 2, 1j)
    assert np.isclose(fe.k2_raw[0].data[0, 0] ** 2, 1.0)
    assert_factored(fe)


def test_uso_of_real_orthogonal(rng):
    g = sample_group(unitary_group(3, R), rng).promote(C)
    fe = uso_factor(g)
    assert np.allclose(fe.theta.as_array(), 0.0)
    assert_factored(fe)


def test_uso_of_small_matrix(rng):
    g = DenseMatrix(C, 1e-5 * (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))))
    fe = uso_factor(g)
    assert (fe.reconstruction() - g).norm() < TOL * g.norm()
    for groups, raw in ((fe.spec.k1.groups, fe.k1_raw), (fe.spec.k2.groups, fe.k2_raw)):
        for group, m in zip(groups, raw):
            assert membership_residual(group, m) < TOL * group.size
    assert fe.theta.violations() == 0


def test_uso_right_fold_is_takagi(rng):
    g = sample_group(gl_group(3, C), rng, 0.7)
    fe = uso_factor(g)
    _, lam = takagi(DenseMatrix(C, g.data @ g.data.T))
    assert np.allclose(lam, np.exp(2 * fe.theta.as_array()))
    result = fold(fe, FoldSide.RIGHT)
    assert np.linalg.norm(result.matrix.data - g.data @ g.data.T) < TOL * max(1.0, fe.g.norm() ** 2)


def test_chol_of_identity():
    assert np.allclose(chol_complex_symmetric(identity(3, C)).data, np.eye(3))


def test_chol_of_scalar():
    out = chol_complex_symmetric(DenseMatrix(C, np.array([[1j]])))
    assert np.isclose(out.data[0, 0], np.exp(1j * np.pi / 4))


def test_chol_of_product(rng):
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)) + 4 * np.eye(4)
    a = m @ m.T
    lower = chol_complex_symmetric(DenseMatrix(C, a)).data
    assert np.allclose(np.triu(lower, 1), 0.0)
    assert np.linalg.norm(lower @ lower.T - a) < TOL * np.linalg.norm(a)


def test_chol_errors():
    with pytest.raises(PivotBreakdown):
        chol_complex_symmetric(DenseMatrix(C, np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)))
    with pytest.raises(NotSymmetric):
        chol_complex_symmetric(DenseMatrix(C, np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex)))


# ============================================================
# F18: CSD hiperbólica
# ============================================================


def test_hcsd_of_identity():
    fe = hcsd(identity(3), 1, 2, 1)
    assert np.allclose(fe.theta.as_array(), 0.0)
    assert_factored(fe)


def test_hcsd_of_boost():
    t = 0.8
    g = DenseMatrix(R, np.array([[np.cosh(t), np.sinh(t)], [np.sinh(t), np.cosh(t)]]))
    fe = hcsd(g, 1, 1, 1)
    assert np.isclose(fe.theta.values[0], t)
    for m in fe.k1_raw + fe.k2_raw:
        assert np.isclose(abs(m.data[0, 0]), 1.0)
    assert_factored(fe)


@pytest.mark.parametrize("beta", [1, 2])
def test_hcsd_values_are_offdiagonal_singular_values(rng, beta):
    p, q = 3, 2
    g = sample_group(indefinite_group(p, q, FieldTag.from_beta(beta)), rng, 0.6)
    fe = hcsd(g, beta, p, q)
    oracle = np.linalg.svd(g.data[p:, :p], compute_uv=False)
    assert np.allclose(np.sinh(fe.theta.as_array()), oracle)
    assert_factored(fe)


def test_hcsd_errors():
    with pytest.raises(NotInGroup):
        hcsd(diagonal([2.0, 0.5]), 1, 1, 1)
    with pytest.raises(UnsupportedField):
        hcsd(identity(2, H), 4, 1, 1)


# ============================================================
# COROLÁRIOS DO FOLDING
# ============================================================


def check_williamson(a, s, sigma):
    n = len(sigma)
    assert membership_residual(symplectic_group(n, R), s) < TOL
    out = s.data @ a @ s.data.T
    assert np.linalg.norm(out - np.diag(np.concatenate([sigma, sigma]))) < TOL * np.linalg.norm(a)


def test_williamson_of_identity():
    s, sigma = williamson(identity(4))
    assert np.allclose(sigma, 1.0)
    check_williamson(np.eye(4), s, sigma)


def test_williamson_of_diagonal():
    s, sigma = williamson(diagonal([4.0, 1.0]))
    assert np.allclose(sigma, [2.0])
    check_williamson(np.diag([4.0, 1.0]), s, sigma)


def test_williamson_is_symplectic_invariant(rng):
    m = rng.standard_normal((4, 4))
    a = m @ m.T + np.eye(4)
    w = sample_group(symplectic_group(2, R), rng).data
    _, sigma = williamson(DenseMatrix(R, a))
    s2, sigma2 = williamson(DenseMatrix(R, w.T @ a @ w))
    assert np.allclose(np.sort(sigma), np.sort(sigma2))
    check_williamson(w.T @ a @ w, s2, sigma2)


def test_williamson_errors():
    with pytest.raises(NotSPD):
        williamson(diagonal([1.0, -1.0]))
    with pytest.raises(NotSPD):
        williamson(DenseMatrix(R, np.array([[2.0, 1.0], [0.0, 2.0]])))


def check_hyperbolic_eigen(k, p, q, x, lam):
    ipq = np.diag(np.concatenate([np.ones(p), -np.ones(q)]))
    assert np.linalg.norm(k @ x.data - ipq @ x.data @ np.diag(lam)) < TOL * np.linalg.norm(k)


def test_hyperbolic_eigen_of_identity():
    x, lam = hyperbolic_eigen(identity(3), 2, 1)
    assert np.allclose(lam, [1.0, 1.0, -1.0])
    assert membership_residual(indefinite_group(2, 1, R), x) < TOL


def test_hyperbolic_eigen_of_diagonal():
    x, lam = hyperbolic_eigen(diagonal([4.0, 9.0]), 1, 1)
    assert np.allclose(lam, [4.0, -9.0])
    assert np.allclose(np.abs(x.data), np.eye(2))
    check_hyperbolic_eigen(np.diag([4.0, 9.0]), 1, 1, x, lam)


def test_hyperbolic_eigen_matches_oracle(rng):
    m = rng.standard_normal((4, 4))
    k = m @ m.T + np.eye(4)
    p, q = 3, 1
    x, lam = hyperbolic_eigen(DenseMatrix(R, k), p, q)
    oracle = np.linalg.eigvals(signature_matrix(p, q).data @ k).real
    assert np.allclose(np.sort(lam), np.sort(oracle))
    check_hyperbolic_eigen(k, p, q, x, lam)


def test_hyperbolic_eigen_errors():
    with pytest.raises(NotSPD):
        hyperbolic_eigen(diagonal([1.0, -2.0]), 1, 1)
    with pytest.raises(ShapeMismatch):
        hyperbolic_eigen(identity(3), 1, 1)


def check_nonsquare(x, u, sh, v):
    p, q = x.shape
    middle = np.zeros((p, q))
    middle[np.arange(len(sh)), np.arange(len(sh))] = sh
    assert np.linalg.norm(u.data @ middle @ v.data.T - x) < TOL * max(1.0, np.linalg.norm(x))
    assert np.linalg.norm(u.data.T @ u.data - np.eye(p)) < TOL
    assert np.linalg.norm(v.data.T @ v.data - np.eye(q)) < TOL


def test_nonsquare_svd_of_zero():
    _, sh, _ = nonsquare_svd(DenseMatrix(R, np.zeros((2, 1))))
    assert np.allclose(sh, 0.0)


def test_nonsquare_svd_of_scalar():
    u, sh, v = nonsquare_svd(DenseMatrix(R, np.array([[2.0]])))
    assert np.allclose(sh, [2.0])
    check_nonsquare(np.array([[2.0]]), u, sh, v)


@pytest.mark.parametrize("p, q", [(3, 2), (5, 3), (2, 4), (4, 4)])
def test_nonsquare_svd_matches_oracle(rng, p, q):
    x = rng.standard_normal((p, q))
    u, sh, v = nonsquare_svd(DenseMatrix(R, x))
    assert np.allclose(sh, np.linalg.svd(x, compute_uv=False))
    check_nonsquare(x, u, sh, v)


# ============================================================
# FOLDING
# ============================================================


def test_svd_right_fold_is_symmetric_eigenproblem(rng):
    fe = sample_factored(spec("F7", 1, n=3), rng)
    result = fold(fe, FoldSide.RIGHT)
    assert np.linalg.norm(result.matrix.data - fe.g.data @ fe.g.data.T) < TOL * fe.g.norm() ** 2
    assert np.allclose(np.diag(result.middle_squared.data), np.exp(2 * fe.theta.as_array()))
    assert result.factor is fe.k1


def test_fold_of_identity_element():
    fe = identity_element(spec("F18", 2, p=2, q=1))
    for side in FoldSide:
        result = fold(fe, side)
        assert np.linalg.norm(result.middle_squared.data - np.eye(3)) < TOL
        assert result.residual < TOL


# ============================================================
# ISOMORFISMOS E SVDS ESTRUTURADAS
# ============================================================


@pytest.mark.parametrize("n", [2, 3, 5])
def test_real_perplectic_of_identity(n):
    out = structure_isomorphism(IsoKind.REAL_PERPLECTIC, identity(n))
    assert np.linalg.norm(out.data - np.eye(n)) < TOL


@pytest.mark.parametrize("n", [3, 4])
def test_real_perplectic_image(rng, n):
    g = sample_group(indefinite_group((n + 1) // 2, n // 2, R), rng, 0.6)
    out = structure_isomorphism(IsoKind.REAL_PERPLECTIC, g)
    assert bilinear_residual(out, exchange_matrix(n), TransposeKind.T) < 1e-10
    back = structure_isomorphism(IsoKind.REAL_PERPLECTIC, out, "inverse")
    assert np.linalg.norm(back.data - g.data) < TOL


def test_complex_perplectic_image(rng):
    g = sample_group(orthogonal_group(4, C), rng, 0.6)
    out = structure_isomorphism(IsoKind.COMPLEX_PERPLECTIC, g)
    assert bilinear_residual(out, exchange_matrix(4), TransposeKind.T) < 1e-10


def test_conjugate_symplectic_image(rng):
    g = sample_group(indefinite_group(2, 2, C), rng, 0.6)
    out = structure_isomorphism(IsoKind.CONJUGATE_SYMPLECTIC, g)
    assert bilinear_residual(out, symplectic_form(2), TransposeKind.H) < 1e-10


def test_iso_matrices_are_unitary():
    for kind, n in ((IsoKind.REAL_PERPLECTIC, 5), (IsoKind.COMPLEX_PERPLECTIC, 4), (IsoKind.CONJUGATE_SYMPLECTIC, 4)):
        v = iso_matrix(kind, n).promote(C).data
        assert np.linalg.norm(v.conj().T @ v - np.eye(n)) < TOL
    with pytest.raises(ShapeMismatch):
        iso_matrix(IsoKind.CONJUGATE_SYMPLECTIC, 3)


def test_structure_isomorphism_errors(rng):
    g = sample_group(gl_group(3, R), rng, 1.0)
    with pytest.raises(NotInGroup):
        structure_isomorphism(IsoKind.REAL_PERPLECTIC, g)
    with pytest.raises(NotInGroup):
        structure_isomorphism(IsoKind.REAL_PERPLECTIC, g, "inverse")
    with pytest.raises(ValueError):
        structure_isomorphism(IsoKind.REAL_PERPLECTIC, identity(3), "sideways")


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_perplectic_svd(rng, n):
    g = sample_group(indefinite_group((n + 1) // 2, n // 2, R), rng, 0.6)
    p_mat = structure_isomorphism(IsoKind.REAL_PERPLECTIC, g)
    svd = perplectic_svd(p_mat)
    assert np.linalg.norm(svd.reconstruction().data - p_mat.data) < TOL * max(1.0, p_mat.norm())
    assert np.allclose(svd.values * svd.values[::-1], 1.0)
    for factor in (svd.left, svd.right):
        assert bilinear_residual(factor, exchange_matrix(n), TransposeKind.T) < TOL
        assert bilinear_residual(factor, identity(n), TransposeKind.T) < TOL


@pytest.mark.parametrize("m", [1, 2, 3])
def test_conjugate_symplectic_svd(rng, m):
    g = sample_group(indefinite_group(m, m, C), rng, 0.6)
    s_mat = structure_isomorphism(IsoKind.CONJUGATE_SYMPLECTIC, g)
    svd = conjugate_symplectic_svd(s_mat)
    assert np.linalg.norm(svd.reconstruction().data - s_mat.data) < TOL * max(1.0, s_mat.norm())
    assert np.allclose(svd.values[:m] * svd.values[m:], 1.0)
    for factor in (svd.left, svd.right):
        assert bilinear_residual(factor, symplectic_form(m), TransposeKind.H) < TOL
        assert bilinear_residual(factor, identity(2 * m), TransposeKind.H) < TOL


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_complex_perplectic_image_of_f23(rng, n):
    fe = sample_factored(spec("F23", 2, n=n), rng)
    image, svd = complex_perplectic_image(fe)
    assert bilinear_residual(image, exchange_matrix(n), TransposeKind.T) < TOL * max(1.0, image.norm() ** 2)
    assert np.linalg.norm(svd.reconstruction().data - image.data) < TOL * max(1.0, image.norm())
    assert np.allclose(svd.values * svd.values[::-1], 1.0)


def test_complex_perplectic_image_other_cell(rng):
    with pytest.raises(NoDecomposition):
        complex_perplectic_image(sample_factored(spec("F7", 2, n=2), rng))


# ============================================================
# DESPACHO E ROUND-TRIP
# ============================================================


def test_decompose_compose_only_cell():
    s = spec("F2", 1, n=2)
    with pytest.raises(NoDecomposition):
        decompose(s, identity(4))


def test_decompose_wrong_size():
    with pytest.raises(ShapeMismatch):
        decompose(spec("F7", 1, n=3), identity(2))


def test_decomposable_cells():
    assert len(DECOMPOSABLE) == 12
    assert ("F7", 4) in DECOMPOSABLE
    assert ("F9", 4) not in DECOMPOSABLE


TRIALS = 50

ROUNDTRIP = [
    (fid, beta, params)
    for fid, beta in DECOMPOSABLE
    for size in (1, 2, 3, 4, 6)
    for params in params_for_size(fid, beta, size)
]


@pytest.mark.parametrize("fid, beta, params", ROUNDTRIP)
def test_roundtrip(fid, beta, params, rng):
    s = spec(fid, beta, params)
    for trial in range(TRIALS):
        report = harness_service.roundtrip(s, rng, seed=trial)
        assert report.passed, report.summary()
