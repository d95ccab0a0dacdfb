import numpy as np
import pytest

from . import TOL
from app.errors import ShapeMismatch, UnknownInvolution, WrongField
from app.groups import (
    GroupFamily,
    GroupId,
    InvolutionFormula,
    InvolutionId,
    Representation,
    defining_pair,
    gl_group,
    group_involution,
    indefinite_group,
    involution,
    membership_residual,
    orthogonal_group,
    sample_algebra,
    sample_group,
    split_eigenspaces,
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
    identity,
    inverse,
    realify,
    signature_matrix,
    symplectic_form,
)
from app.registry import all_cells, params_for_size, sample_factored, spec

R, C, H = FieldTag.R, FieldTag.C, FieldTag.H

GROUPS = [
    unitary_group(3, R),
    unitary_group(3, C),
    unitary_group(2, H),
    indefinite_group(2, 1, R),
    indefinite_group(1, 2, C),
    indefinite_group(2, 1, H),
    symplectic_group(2, R),
    symplectic_group(1, C),
    orthogonal_group(3, C),
    orthogonal_group(2, H, unit="j"),
    orthogonal_group(2, H, unit="i"),
    GroupId(GroupFamily.U, C, 2, representation=Representation.REALIFIED),
    GroupId(GroupFamily.U, H, 2, representation=Representation.COMPLEXIFIED),
]


# ============================================================
# IDENTIFICAÇÃO E PAR DEFINIDOR
# ============================================================


def test_group_rows():
    with pytest.raises(WrongField):
        symplectic_group(2, H)
    with pytest.raises(WrongField):
        orthogonal_group(2, R)
    with pytest.raises(WrongField):
        GroupId(GroupFamily.U, R, 2, representation=Representation.REALIFIED)
    assert indefinite_group(2, 1, C).size == 3
    assert symplectic_group(2, R).size == 4
    assert GroupId(GroupFamily.U, H, 3, representation=Representation.COMPLEXIFIED).size == 6


def test_group_labels():
    assert unitary_group(3, R).label() == "O(3)"
    assert indefinite_group(2, 1, C).label() == "U(2,1)"
    assert symplectic_group(2, R).label() == "Sp(4,R)"
    assert orthogonal_group(2, H, unit="i").label() == "O_i(2,H)"
    assert GroupId(GroupFamily.U, C, 3, representation=Representation.REALIFIED).label() == "realify(U(3))"


def test_defining_pairs():
    pair = defining_pair(unitary_group(4, R))
    assert pair.transpose is TransposeKind.T
    assert np.array_equal(pair.j.data, np.eye(4))

    pair = defining_pair(symplectic_group(2, R))
    assert pair.transpose is TransposeKind.T
    assert np.array_equal(pair.j.data, symplectic_form(2).data)

    pair = defining_pair(orthogonal_group(3, H, unit="j"))
    assert pair.transpose is TransposeKind.D_J
    assert np.array_equal(pair.j.data, np.eye(3))

    assert defining_pair(gl_group(2, C)).transpose is None


# ============================================================
# PERTINÊNCIA
# ============================================================


@pytest.mark.parametrize("group", GROUPS, ids=lambda g: g.label())
def test_identity_is_member(group):
    assert membership_residual(group, identity(group.size, group.matrix_field)) == 0.0


@pytest.mark.parametrize("group", GROUPS, ids=lambda g: g.label())
def test_samples_are_members(group, rng):
    for _ in range(5):
        g = sample_group(group, rng, 0.5)
        assert g.shape == (group.size, group.size)
        assert membership_residual(group, g) < 1e-10 * group.size


def test_beta_doubling_of_unitaries(rng):
    for _ in range(100):
        u = sample_group(unitary_group(3, C), rng)
        ru = realify(u)
        assert membership_residual(unitary_group(6, R), ru) <= 1e-12
        assert membership_residual(symplectic_group(3, R), ru) <= 1e-12

        q = sample_group(unitary_group(2, H), rng)
        cq = complexify(q)
        assert membership_residual(unitary_group(4, C), cq) <= 1e-12
        assert membership_residual(symplectic_group(2, C), cq) <= 1e-12


def test_non_member_fails():
    g = diagonal([2.0, 0.5])
    assert membership_residual(indefinite_group(1, 1, R), g) > 1.0


def test_gl_membership():
    assert membership_residual(gl_group(2, R), diagonal([3.0, 1e-3])) == 0.0
    assert membership_residual(gl_group(2, R), DenseMatrix(R, np.ones((2, 2)))) == float("inf")


def test_gl_margin_uses_frobenius_norm():
    # σ_min/σ_max = 1e-12 passa o limiar; σ_min/‖M‖_F ≈ 1e-13 não
    ones = np.ones(99)
    assert membership_residual(gl_group(100, R), diagonal(np.append(ones, 1e-12))) == float("inf")
    assert membership_residual(gl_group(100, R), diagonal(np.append(ones, 1e-11))) == 0.0


@pytest.mark.parametrize("group", GROUPS, ids=lambda g: g.label())
def test_group_closure(group, rng):
    for _ in range(5):
        a, b = sample_group(group, rng, 0.5), sample_group(group, rng, 0.5)
        assert membership_residual(group, a @ b) < 1e-10 * group.size
        assert membership_residual(group, inverse(a)) < 1e-10 * group.size


def test_membership_shape_and_field():
    with pytest.raises(ShapeMismatch):
        membership_residual(unitary_group(3, R), identity(2))
    with pytest.raises(ShapeMismatch):
        membership_residual(unitary_group(2, R), identity(2, C))


def test_orthogonal_sample_membership():
    g = sample_group(unitary_group(4, R), np.random.default_rng(4))
    assert membership_residual(unitary_group(4, R), g) <= 1e-12


def test_indefinite_sample_relation():
    g = sample_group(indefinite_group(2, 1, C), np.random.default_rng(21), 0.5)
    ipq = signature_matrix(2, 1)
    assert (conj_transpose(g, TransposeKind.H) @ ipq @ g - ipq).norm() <= 1e-11


def test_sample_of_zero_scale_is_identity(rng):
    for group in GROUPS:
        g = sample_group(group, rng, 0.0)
        assert np.linalg.norm(g.data - identity(group.size, group.matrix_field).data) < TOL


# ============================================================
# ÁLGEBRAS DE LIE
# ============================================================


def test_orthogonal_algebra_is_skew(rng):
    x = sample_algebra(unitary_group(5, R), rng)
    assert np.linalg.norm(x.data + x.data.T) == 0.0


def test_indefinite_algebra_blocks(rng):
    p, q = 2, 3
    x = sample_algebra(indefinite_group(p, q, C), rng).data
    a, b, b2, c = x[:p, :p], x[:p, p:], x[p:, :p], x[p:, p:]
    assert np.linalg.norm(a + a.conj().T) < TOL
    assert np.linalg.norm(c + c.conj().T) < TOL
    assert np.linalg.norm(b2 - b.conj().T) < TOL


def test_complexified_gl_algebra_blocks(rng):
    n = 3
    x = sample_algebra(GroupId(GroupFamily.GL, H, n, representation=Representation.COMPLEXIFIED), rng).data
    a, b, b2, a2 = x[:n, :n], x[:n, n:], x[n:, :n], x[n:, n:]
    assert np.linalg.norm(b2 + b.conj()) < TOL
    assert np.linalg.norm(a2 - a.conj()) < TOL


def test_symplectic_algebra(rng):
    x = sample_algebra(symplectic_group(3, R), rng)
    j = symplectic_form(3)
    assert (conj_transpose(x, TransposeKind.T) @ j + j @ x).norm() < TOL


# ============================================================
# INVOLUÇÕES
# ============================================================


def test_cartan_involution_on_symmetric(rng):
    a = rng.standard_normal((4, 4))
    x = DenseMatrix(R, a + a.T)
    out = involution(InvolutionId(InvolutionFormula.NEG_TRANSPOSE), x)
    assert np.array_equal(out.data, -x.data)


def test_signature_involution_fixes_block_diagonal(rng):
    x = np.zeros((3, 3))
    x[:2, :2] = rng.standard_normal((2, 2))
    x[2, 2] = 1.5
    out = involution(InvolutionId(InvolutionFormula.CONJ_BY_IPQ, (2, 1)), DenseMatrix(R, x))
    assert np.linalg.norm(out.data - x) < TOL


def test_split_eigenspaces(rng):
    x = DenseMatrix(R, rng.standard_normal((4, 4)))
    inv = InvolutionId(InvolutionFormula.NEG_TRANSPOSE)
    k, p = split_eigenspaces(x, inv)
    assert np.linalg.norm(k.data + k.data.T) < TOL
    assert np.linalg.norm(p.data - p.data.T) < TOL
    assert np.linalg.norm((k + p).data - x.data) < TOL

    sym = DenseMatrix(R, x.data + x.data.T)
    k, p = split_eigenspaces(sym, inv)
    assert np.linalg.norm(k.data) < TOL
    assert np.linalg.norm(p.data - sym.data) < TOL


def test_involution_errors():
    with pytest.raises(UnknownInvolution):
        involution(InvolutionId(InvolutionFormula.ENTRY_CONJ), identity(2, H))
    with pytest.raises(ShapeMismatch):
        involution(InvolutionId(InvolutionFormula.CONJ_BY_IPQ, (2, 2)), identity(3))


CELLS = [(fid, beta, params_for_size(fid, beta, 4)[0]) for fid, beta in all_cells() if params_for_size(fid, beta, 4)]


@pytest.mark.parametrize("fid, beta, params", CELLS)
def test_catalog_involutions_are_involutive(fid, beta, params, rng):
    s = spec(fid, beta, params)
    for _ in range(3):
        x = sample_algebra(s.ambient, rng)
        for inv in (s.sigma, s.tau):
            assert (involution(inv, involution(inv, x)) - x).norm() < TOL


@pytest.mark.parametrize("fid, beta, params", CELLS)
def test_group_involution_fixes_factors_and_inverts_middle(fid, beta, params, rng):
    s = spec(fid, beta, params)
    fe = sample_factored(s, rng)
    scale = max(1.0, fe.g.norm())
    assert (group_involution(s.sigma, fe.k1) - fe.k1).norm() < TOL * scale
    assert (group_involution(s.tau, fe.k2) - fe.k2).norm() < TOL * scale
    for inv in (s.sigma, s.tau):
        assert (group_involution(inv, fe.a) - inverse(fe.a)).norm() < TOL * scale
