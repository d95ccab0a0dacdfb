"""
Decomposições numéricas.

Algoritmos para o subconjunto curado do catálogo (F1, F4, F7, F9, F10,
F13, F18), as fatorações de Takagi e Cholesky simétrica complexa, o
folding com seus corolários (Williamson, autoproblema hiperbólico, SVD
não quadrada) e os isomorfismos de estrutura com as SVDs estruturadas
que eles produzem.

Todas as rotas reduzem o problema a autovalores simétricos/hermitianos,
forma de Schur real ou SVD (numpy/scipy); a precisão atingível fica em
torno de 1e-9 por causa do quadrado que o folding introduz.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy import linalg

from app.config import CLUSTER_TOL, FACTOR_TOL, GL_MARGIN, SYMMETRY_TOL
from app.errors import (
    NoDecomposition,
    NotInGroup,
    NotSPD,
    NotSymmetric,
    PivotBreakdown,
    ShapeMismatch,
    SignatureMismatch,
    Singular,
    UnsupportedField,
    WrongField,
)
from app.groups import (
    GroupId,
    bilinear_residual,
    group_involution,
    indefinite_group,
    membership_residual,
    orthogonal_group,
)
from app.numeric import (
    DenseMatrix,
    FieldTag,
    TransposeKind,
    block_diag,
    complexify,
    conj_transpose,
    dagger,
    diagonal,
    exchange_matrix,
    identity,
    inverse,
    signature_matrix,
    singular_values,
    symplectic_form,
)
from app.registry import FactoredElement, FactorizationSpec, assemble, spec as make_spec
from app.templates import build_middle

logger = logging.getLogger(__name__)

# ============================================================
# AUXILIARES
# ============================================================


def _coerce(m: DenseMatrix, fld: FieldTag) -> DenseMatrix:
    if m.field.beta > fld.beta:
        raise WrongField(f"esperada matriz sobre {fld.value}, recebida sobre {m.field.value}")
    return m.promote(fld)


def _require_square(m: DenseMatrix) -> int:
    if not m.is_square:
        raise ShapeMismatch(f"matriz quadrada esperada, recebida {m.rows}x{m.cols}")
    return m.rows


def _require_member(group: GroupId, m: DenseMatrix, what: str) -> None:
    residual = membership_residual(group, m)
    if residual > FACTOR_TOL * max(1, group.size):
        raise NotInGroup(f"{what}: entrada fora de {group.label()} (resíduo {residual:.3e})")


def _require_invertible(m: DenseMatrix, what: str) -> None:
    sv = singular_values(m)
    if sv.size and sv[-1] <= GL_MARGIN * sv[0]:
        raise Singular(f"{what}: matriz singular (σ_min/σ_max = {sv[-1] / sv[0]:.3e})")


def _require_beta(beta: int, allowed: tuple[int, ...], what: str) -> FieldTag:
    if beta not in allowed:
        raise UnsupportedField(f"{what} só está disponível para β ∈ {allowed}, recebeu β={beta}")
    return FieldTag.from_beta(beta)


def _clusters(values: np.ndarray, tol: float = CLUSTER_TOL) -> list[np.ndarray]:
    """Grupos de índices consecutivos de valores ordenados (crescentes) quase iguais."""
    if values.size == 0:
        return []
    scale = max(1.0, float(np.max(np.abs(values))))
    breaks = np.where(np.diff(values) > tol * scale)[0] + 1
    return np.split(np.arange(values.size), breaks)


def _hermitian(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


# ============================================================
# F7: SVD (ℝ, ℂ, ℍ)
# ============================================================


def _quaternion_partner(v: np.ndarray) -> np.ndarray:
    """Parceiro de Kramers [a; c] ↦ [−c̄; ā] (mesmo autoespaço, ortogonal a v)."""
    n = v.size // 2
    a, c = v[:n], v[n:]
    return np.concatenate([-c.conj(), a.conj()])


def _quaternion_eigh(k: DenseMatrix) -> tuple[np.ndarray, DenseMatrix]:
    """
    Autodecomposição de uma matriz quaterniônica hermitiana.

    Resolve eigh na versão complexificada; cada autovalor aparece em par.
    Dentro de cada grupo de autovalores escolhe vetores por projeção com
    pivô e descarta o par (v, parceiro) antes do próximo.

    Returns:
        (autovalores crescentes, matriz quaterniônica unitária de autovetores)
    """
    n = k.rows
    w, v = np.linalg.eigh(_hermitian(complexify(k).data))
    groups = _clusters(w)
    merged: list[np.ndarray] = []
    for idx in groups:
        if merged and merged[-1].size % 2:
            merged[-1] = np.concatenate([merged[-1], idx])
        else:
            merged.append(idx)

    vals, vecs = [], []
    for idx in merged:
        basis = v[:, idx]
        for _ in range(idx.size // 2):
            norms = np.linalg.norm(basis, axis=0)
            x = basis[:, np.argmax(norms)]
            x = x / np.linalg.norm(x)
            pair = np.column_stack([x, _quaternion_partner(x)])
            basis = basis - pair @ (pair.conj().T @ basis)
            vals.append(float(np.mean(w[idx])))
            vecs.append(x)

    cols = np.column_stack(vecs)
    a, c = cols[:n], cols[n:]
    q = np.stack([a.real, a.imag, -c.real, c.imag], axis=-1)
    return np.array(vals), DenseMatrix(FieldTag.H, q)


def svd_factor(g: DenseMatrix, beta: int) -> FactoredElement:
    """
    SVD G = U·Σ·V com U, V ∈ U_β(n) e Σ positiva decrescente (F7).

    Sobre ℍ: autodecomposição de G·G^D = U·Σ²·U^D e V = Σ⁻¹·U^D·G.

    Raises:
        Singular: G numericamente singular
    """
    fld = FieldTag.from_beta(beta)
    g = _coerce(g, fld)
    n = _require_square(g)
    spec_ = make_spec("F7", beta, n=n)
    _require_invertible(g, "svd")

    if fld is FieldTag.H:
        vals, u = _quaternion_eigh(g @ dagger(g))
        order = np.argsort(-vals, kind="stable")
        sigma = np.sqrt(np.clip(vals[order], 0.0, None))
        u = DenseMatrix(FieldTag.H, u.data[:, order])
        v = diagonal(1.0 / sigma) @ dagger(u) @ g
    else:
        uu, sigma, vh = np.linalg.svd(g.data)
        u, v = DenseMatrix(fld, uu), DenseMatrix(fld, vh)

    return assemble(spec_, (u,), np.log(sigma), (v,), g)


# ============================================================
# F1: ODO (ℂ)
# ============================================================


def odo(u: DenseMatrix) -> FactoredElement:
    """
    U = O₁·D·O₂ com O₁, O₂ reais ortogonais e D diagonal unitária.

    Diagonaliza simultaneamente Re(UᵀU) e Im(UᵀU) por uma ortogonal real Q;
    os autovalores de UᵀU são e^{2iθ}. Depois O₂ = Qᵀ e O₁ = Re(U·Q·D⁻¹).

    Raises:
        NotInGroup: U não é unitária
    """
    u = _coerce(u, FieldTag.C)
    n = _require_square(u)
    spec_ = make_spec("F1", 2, n=n)
    _require_member(spec_.ambient, u, "odo")

    w = u.data.T @ u.data
    re, im = (w.real + w.real.T) / 2, (w.imag + w.imag.T) / 2
    evals, q = np.linalg.eigh(re)
    for idx in _clusters(evals):
        if idx.size > 1:
            sub = q[:, idx]
            _, rot = np.linalg.eigh((sub.T @ im @ sub + (sub.T @ im @ sub).T) / 2)
            q[:, idx] = sub @ rot

    lam = np.diag(q.T @ w @ q)
    theta = np.mod(np.angle(lam) / 2, np.pi)
    # θ ≡ θ − π: a coluna de O₁ absorve o sinal
    theta = np.where(np.pi - theta <= GL_MARGIN, 0.0, theta)
    order = np.argsort(-theta, kind="stable")
    theta, q = theta[order], q[:, order]
    o1 = (u.data @ q * np.exp(-1j * theta)[None, :]).real
    o2 = q.T

    return assemble(spec_, (DenseMatrix(FieldTag.R, o1),), theta, (DenseMatrix(FieldTag.R, o2),), u)


# ============================================================
# F4: CSD (ℝ, ℂ)
# ============================================================


def csd(q_mat: DenseMatrix, beta: int, p: int, q: int, r: int, s: int) -> FactoredElement:
    """
    Decomposição CS Q = diag(U_p, U_q)·M(θ)·diag(U_r, U_s).

    Ancora no SVD completo do bloco Q[:p, n−s:] (p×s) que carrega os senos;
    as últimas s colunas de U_q saem das colunas cosseno normalizadas e
    U_r sai da projeção das primeiras r colunas.

    Raises:
        NotInGroup: Q não é unitária
        BadPartition: partição fora de r ≥ p ≥ q ≥ s
    """
    fld = _require_beta(beta, (1, 2), "csd")
    q_mat = _coerce(q_mat, fld)
    spec_ = make_spec("F4", beta, p=p, q=q, r=r, s=s)
    _require_member(spec_.ambient, q_mat, "csd")
    a = q_mat.data
    n = p + q

    if s == 0:
        k1 = (identity(p, fld), identity(q, fld))
        k2 = (q_mat, identity(0, fld))
        return assemble(spec_, k1, np.zeros(0), k2, q_mat)

    w, sn, vh = np.linalg.svd(a[:p, n - s :])
    cos_cols = a[p:, n - s :] @ vh.conj().T
    cn = np.linalg.norm(cos_cols, axis=0)
    theta = np.arctan2(sn, cn)
    y = cos_cols / np.where(cn > 0, cn, 1.0)[None, :]
    basis, _ = np.linalg.qr(y, mode="complete")
    uq = np.hstack([basis[:, s:], y])
    up = w

    d = block_diag(DenseMatrix(fld, up), DenseMatrix(fld, uq))
    m_r = DenseMatrix(fld, build_middle(spec_, theta).data[:, :r])
    ur = dagger(m_r) @ dagger(d) @ DenseMatrix(fld, a[:, :r])

    k1 = (DenseMatrix(fld, up), DenseMatrix(fld, uq))
    k2 = (ur, DenseMatrix(fld, vh))
    return assemble(spec_, k1, theta, k2, q_mat)


# ============================================================
# F9: SVD hiperbólica (ℝ, ℂ)
# ============================================================


def hsvd(g: DenseMatrix, beta: int, p: int, q: int) -> FactoredElement:
    """
    G = O·Σ·V com O ∈ U_β(n) e V ∈ U_β(p,q).

    Rota: G·I_{p,q}·G† = O·(Σ²·I_{p,q})·O†; positivos primeiro, cada grupo
    em ordem decrescente de |λ|; V = Σ⁻¹·O†·G.

    Raises:
        SignatureMismatch: inércia de G·I_{p,q}·G† diferente de (p, q)
        Singular: G singular
    """
    fld = _require_beta(beta, (1, 2), "hsvd")
    g = _coerce(g, fld)
    n = _require_square(g)
    spec_ = make_spec("F9", beta, n=n, p=p, q=q)
    _require_invertible(g, "hsvd")

    j = np.concatenate([np.ones(p), -np.ones(q)])
    k = _hermitian((g.data * j[None, :]) @ g.data.conj().T)
    lam, o = np.linalg.eigh(k)
    positive = np.where(lam > 0)[0]
    if positive.size != p:
        raise SignatureMismatch(f"hsvd: {positive.size} autovalores positivos, esperado p={p}")
    order = np.concatenate([positive[::-1], np.where(lam <= 0)[0]])
    o = o[:, order]
    sigma = np.sqrt(np.abs(lam[order]))
    v = (o.conj().T @ g.data) / sigma[:, None]

    return assemble(spec_, (DenseMatrix(fld, o),), np.log(sigma), (DenseMatrix(fld, v),), g)


# ============================================================
# F10: SVD simplética (ℝ)
# ============================================================


def sympl_svd(g: DenseMatrix) -> FactoredElement:
    """
    G = O·diag(Σ, Σ)·S com O ∈ O(2n) e S ∈ Sp(2n, ℝ).

    Forma de Schur real da antissimétrica K = G·J·Gᵀ: blocos 2×2
    [[0, σ²], [−σ², 0]] reordenados para o layout [[0, Λ], [−Λ, 0]].

    Raises:
        Singular: G singular ou forma de Schur sem blocos 2×2
    """
    g = _coerce(g, FieldTag.R)
    size = _require_square(g)
    if size % 2:
        raise ShapeMismatch(f"sympl_svd espera dimensão par, recebeu {size}")
    n = size // 2
    spec_ = make_spec("F10", 1, n=n)
    _require_invertible(g, "sympl_svd")

    j = symplectic_form(n).data
    k = g.data @ j @ g.data.T
    t, z = linalg.schur((k - k.T) / 2, output="real")

    firsts, seconds, lam = [], [], []
    for i in range(0, size, 2):
        b = (t[i, i + 1] - t[i + 1, i]) / 2
        if abs(t[i + 1, i]) == 0.0 or abs(b) == 0.0:
            raise Singular("sympl_svd: forma de Schur sem bloco 2×2 (G·J·Gᵀ singular)")
        u, w = z[:, i], z[:, i + 1]
        if b < 0:
            u, w, b = w, u, -b
        firsts.append(u)
        seconds.append(w)
        lam.append(b)

    lam = np.array(lam)
    order = np.argsort(-lam, kind="stable")
    o = np.column_stack([firsts[i] for i in order] + [seconds[i] for i in order])
    sigma = np.sqrt(lam[order])
    scale = np.concatenate([sigma, sigma])
    s = (o.T @ g.data) / scale[:, None]

    return assemble(spec_, (DenseMatrix(FieldTag.R, o),), np.log(sigma), (DenseMatrix(FieldTag.R, s),), g)


# ============================================================
# TAKAGI, F13 E CHOLESKY SIMÉTRICA COMPLEXA
# ============================================================


def _require_symmetric(a: np.ndarray, what: str) -> None:
    scale = max(1.0, float(np.linalg.norm(a)))
    if np.linalg.norm(a - a.T) > SYMMETRY_TOL * scale:
        raise NotSymmetric(f"{what}: matriz não simétrica")


def takagi(a: DenseMatrix) -> tuple[DenseMatrix, np.ndarray]:
    """
    Fatoração de Takagi A = U·Λ·Uᵀ (transposta sem conjugação).

    Entrada real usa eigh com fases √(sinal); o caso geral parte do SVD
    A = V·Λ·Wᴴ e corrige cada grupo degenerado com sqrtm(V_iᵀ·W_i).

    Returns:
        (U unitária, Λ não negativa decrescente)

    Raises:
        NotSymmetric: ‖A − Aᵀ‖ acima da tolerância
    """
    a = _coerce(a, FieldTag.C)
    n = _require_square(a)
    data = a.data
    _require_symmetric(data, "takagi")

    if not np.any(data):
        return identity(n, FieldTag.C), np.zeros(n)

    if not np.any(data.imag):
        lam, u = np.linalg.eigh(data.real)
        phases = np.where(lam >= 0, 1.0, 1j)
        vals = np.abs(lam)
        order = np.argsort(-vals, kind="stable")
        return DenseMatrix(FieldTag.C, (u * phases[None, :])[:, order]), vals[order]

    v, lam, wh = np.linalg.svd(data)
    w = wh.conj().T
    # grupos degenerados medidos relativamente a λ_max
    groups = _clusters(-lam / lam[0])
    roots = [linalg.sqrtm(v[:, idx].T @ w[:, idx]) for idx in groups]
    correction = linalg.block_diag(*roots)
    u = v @ correction.conj()
    return DenseMatrix(FieldTag.C, u), lam


def uso_factor(g: DenseMatrix) -> FactoredElement:
    """
    G = U·Σ·O com U unitária e O complexa ortogonal (F13, ℂ).

    Takagi de G·Gᵀ dá U e Σ²; O = Σ⁻¹·Uᴴ·G.

    Raises:
        Singular: G singular
    """
    g = _coerce(g, FieldTag.C)
    n = _require_square(g)
    spec_ = make_spec("F13", 2, n=n)
    _require_invertible(g, "uso")
    u, lam = takagi(DenseMatrix(FieldTag.C, g.data @ g.data.T))
    if lam.size and lam[-1] <= GL_MARGIN * lam[0]:
        raise Singular("uso: G·Gᵀ singular")
    sigma = np.sqrt(lam)
    o = (u.data.conj().T @ g.data) / sigma[:, None]
    return assemble(spec_, (u,), np.log(sigma), (DenseMatrix(FieldTag.C, o),), g)


def chol_complex_symmetric(a: DenseMatrix, tol: float = GL_MARGIN) -> DenseMatrix:
    """
    A = L·Lᵀ para A complexa simétrica, sem pivoteamento.

    Raises:
        NotSymmetric: A ≠ Aᵀ
        PivotBreakdown: pivô |d| ≤ tol·‖A‖ na eliminação
    """
    a = _coerce(a, FieldTag.C)
    n = _require_square(a)
    data = a.data
    _require_symmetric(data, "cholesky simétrica")
    bound = tol * max(1.0, float(np.linalg.norm(data)))

    lower = np.zeros((n, n), dtype=complex)
    for j in range(n):
        d = data[j, j] - np.sum(lower[j, :j] ** 2)
        if abs(d) <= bound:
            raise PivotBreakdown(f"pivô nulo na coluna {j} (|d| = {abs(d):.3e})")
        lower[j, j] = np.sqrt(d)
        lower[j + 1 :, j] = (data[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / lower[j, j]
    return DenseMatrix(FieldTag.C, lower)


# ============================================================
# F18: CSD hiperbólica (ℝ, ℂ)
# ============================================================


def hcsd(g: DenseMatrix, beta: int, p: int, q: int) -> FactoredElement:
    """
    G = diag(U_p, U_q)·H_{p,q}(θ)·diag(U′_p, U′_q) para G ∈ U_β(p,q), p ≥ q.

    Ancora no SVD completo de G₂₁ = Y·[Sh, 0]·Zᴴ: U_q = Y, U′_p = Zᴴ,
    Ch = √(1 + Sh²), U′_q = Ch⁻¹·Yᴴ·G₂₂ e U_p = G₁₁·Z·diag(Ch⁻¹, I).

    Raises:
        NotInGroup: G fora de U_β(p,q)
    """
    fld = _require_beta(beta, (1, 2), "hcsd")
    g = _coerce(g, fld)
    spec_ = make_spec("F18", beta, p=p, q=q)
    _require_member(spec_.ambient, g, "hcsd")
    a = g.data

    if q == 0:
        return assemble(spec_, (g, identity(0, fld)), np.zeros(0), (identity(p, fld), identity(0, fld)), g)

    y, sh, zh = np.linalg.svd(a[p:, :p])
    ch = np.sqrt(1.0 + sh**2)
    uq2 = (y.conj().T @ a[p:, p:]) / ch[:, None]
    scale = np.ones(p)
    scale[:q] = ch
    up = (a[:p, :p] @ zh.conj().T) / scale[None, :]

    k1 = (DenseMatrix(fld, up), DenseMatrix(fld, y))
    k2 = (DenseMatrix(fld, zh), DenseMatrix(fld, uq2))
    return assemble(spec_, k1, np.arcsinh(sh), k2, g)


# ============================================================
# COROLÁRIOS DO FOLDING
# ============================================================


def williamson(a: DenseMatrix) -> tuple[DenseMatrix, np.ndarray]:
    """
    Forma normal de Williamson: S·A·Sᵀ = diag(Σ, Σ), S ∈ Sp(2n, ℝ).

    A = GᵀG (Cholesky), sympl_svd(G) = O·diag(Σ_G, Σ_G)·S_G e então
    S = S_G^{-T}, Σ = Σ_G². Σ são os autovalores simpléticos de A.

    Raises:
        NotSPD: A não é simétrica positiva definida
    """
    a = _coerce(a, FieldTag.R)
    size = _require_square(a)
    if size % 2:
        raise ShapeMismatch(f"williamson espera dimensão par, recebeu {size}")
    data = a.data
    if np.linalg.norm(data - data.T) > SYMMETRY_TOL * max(1.0, float(np.linalg.norm(data))):
        raise NotSPD("williamson: matriz não simétrica")
    try:
        lower = np.linalg.cholesky((data + data.T) / 2)
    except np.linalg.LinAlgError as e:
        raise NotSPD(f"williamson: matriz não positiva definida ({e})") from e

    fe = sympl_svd(DenseMatrix(FieldTag.R, lower.T))
    s_w = conj_transpose(inverse(fe.k2_raw[0]), TransposeKind.T)
    return s_w, np.exp(2 * fe.theta.as_array())


def hyperbolic_eigen(k: DenseMatrix, p: int, q: int) -> tuple[DenseMatrix, np.ndarray]:
    """
    Autoproblema hiperbólico K·x = λ·I_{p,q}·x.

    Folding à esquerda da hsvd no fator de Cholesky G = L† (K = G†G):
    X = I_{p,q}·V†·I_{p,q} e Λ = I_{p,q}·Σ².

    Returns:
        (X, Λ) com K·X = I_{p,q}·X·diag(Λ)

    Raises:
        NotSPD: K não é hermitiana positiva definida
    """
    if k.field is FieldTag.H:
        raise UnsupportedField("hyperbolic_eigen só está disponível sobre ℝ e ℂ")
    n = _require_square(k)
    if p + q != n:
        raise ShapeMismatch(f"hyperbolic_eigen: p+q = {p + q} ≠ {n}")
    data = k.data
    if np.linalg.norm(data - data.conj().T) > SYMMETRY_TOL * max(1.0, float(np.linalg.norm(data))):
        raise NotSPD("hyperbolic_eigen: matriz não hermitiana")
    try:
        lower = np.linalg.cholesky(_hermitian(data))
    except np.linalg.LinAlgError as e:
        raise NotSPD(f"hyperbolic_eigen: matriz não positiva definida ({e})") from e

    fe = hsvd(DenseMatrix(k.field, lower.conj().T), k.field.beta, p, q)
    ipq = signature_matrix(p, q)
    x = ipq @ dagger(fe.k2_raw[0]) @ ipq
    lam = np.concatenate([np.ones(p), -np.ones(q)]) * np.exp(2 * fe.theta.as_array())
    return x, lam


def _spd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.T) / 2)
    return (v * np.sqrt(np.clip(w, 0.0, None))[None, :]) @ v.T


def nonsquare_svd(x: DenseMatrix) -> tuple[DenseMatrix, np.ndarray, DenseMatrix]:
    """
    SVD de uma matriz real p×q lida numa CSD hiperbólica.

    Monta G = [[√(I+XXᵀ), X], [Xᵀ, √(I+XᵀX)]] ∈ O(p,q), aplica hcsd e lê
    X = U·[Sh; 0]·Vᵀ. Para p < q trabalha com Xᵀ.

    Returns:
        (U p×p ortogonal, valores Sh decrescentes, V q×q ortogonal)
    """
    x = _coerce(x, FieldTag.R)
    p, q = x.shape
    if p < q:
        u, sh, v = nonsquare_svd(conj_transpose(x, TransposeKind.T))
        return v, sh, u
    d = x.data
    g = np.block([[_spd_sqrt(np.eye(p) + d @ d.T), d], [d.T, _spd_sqrt(np.eye(q) + d.T @ d)]])
    fe = hcsd(DenseMatrix(FieldTag.R, g), 1, p, q)
    u = fe.k1_raw[0]
    v = conj_transpose(fe.k2_raw[1], TransposeKind.T)
    return u, np.sinh(fe.theta.as_array()), v


# ============================================================
# FOLDING
# ============================================================


class FoldSide(str, Enum):
    LEFT = "Left"
    RIGHT = "Right"


@dataclass(frozen=True, eq=False)
class FoldResult:
    side: FoldSide
    matrix: DenseMatrix
    factor: DenseMatrix
    middle_squared: DenseMatrix
    residual: float


def fold(fe: FactoredElement, side: FoldSide) -> FoldResult:
    """
    Dobra um lado da fatoração com a involução do grupo.

    Right: g·Θ_τ(g)⁻¹ = k₁·a²·Θ_τ(k₁)⁻¹
    Left:  Θ_σ(g)⁻¹·g = Θ_σ(k₂)⁻¹·a²·k₂

    residual é ‖lado esquerdo − lado direito‖_F calculado com os fatores.
    """
    side = FoldSide(side)
    a2 = fe.a @ fe.a
    if side is FoldSide.RIGHT:
        theta2 = lambda m: group_involution(fe.spec.tau, m)  # noqa: E731
        matrix = fe.g @ inverse(theta2(fe.g))
        factor = fe.k1
        expected = fe.k1 @ a2 @ inverse(theta2(fe.k1))
    else:
        theta1 = lambda m: group_involution(fe.spec.sigma, m)  # noqa: E731
        matrix = inverse(theta1(fe.g)) @ fe.g
        factor = fe.k2
        expected = inverse(theta1(fe.k2)) @ a2 @ fe.k2
    residual = (matrix - expected).norm()
    logger.debug(f"{fe.spec.cell_id}: folding {side.value}, resíduo {residual:.3e}")
    return FoldResult(side, matrix, factor, a2, residual)


# ============================================================
# ISOMORFISMOS DE ESTRUTURA
# ============================================================


class IsoKind(str, Enum):
    REAL_PERPLECTIC = "RealPerplectic"
    COMPLEX_PERPLECTIC = "ComplexPerplectic"
    CONJUGATE_SYMPLECTIC = "ConjugateSymplectic"


def iso_matrix(kind: IsoKind, n: int) -> DenseMatrix:
    """
    Matriz V do isomorfismo.

    RealPerplectic: (I_{m₁,m₂} + E_n)/√2 com 1 no centro quando n é ímpar,
    de modo que E_n = V·I_{m₁,m₂}·Vᵀ. ComplexPerplectic:
    ((1+i)/2)·I + ((1−i)/2)·E_n. ConjugateSymplectic (n par):
    (1/√2)·[[I, −iI], [−iI, I]], com i·J = V·I_{n/2,n/2}·Vᴴ.
    """
    kind = IsoKind(kind)
    if kind is IsoKind.REAL_PERPLECTIC:
        m1, m2 = (n + 1) // 2, n // 2
        v = (signature_matrix(m1, m2).data + exchange_matrix(n).data) / np.sqrt(2)
        if n % 2:
            v[n // 2, n // 2] = 1.0
        return DenseMatrix(FieldTag.R, v)
    if kind is IsoKind.COMPLEX_PERPLECTIC:
        return DenseMatrix(FieldTag.C, (1 + 1j) / 2 * np.eye(n) + (1 - 1j) / 2 * exchange_matrix(n).data)
    if n % 2:
        raise ShapeMismatch(f"isomorfismo simplético conjugado exige dimensão par, recebeu {n}")
    m = n // 2
    eye = np.eye(m)
    return DenseMatrix(FieldTag.C, np.block([[eye, -1j * eye], [-1j * eye, eye]]) / np.sqrt(2))


def _iso_source(kind: IsoKind, n: int) -> GroupId:
    if kind is IsoKind.REAL_PERPLECTIC:
        return indefinite_group((n + 1) // 2, n // 2, FieldTag.R)
    if kind is IsoKind.COMPLEX_PERPLECTIC:
        return orthogonal_group(n, FieldTag.C)
    return indefinite_group(n // 2, n // 2, FieldTag.C)


def _iso_target_residual(kind: IsoKind, m: DenseMatrix) -> float:
    if kind is IsoKind.CONJUGATE_SYMPLECTIC:
        return bilinear_residual(m, symplectic_form(m.rows // 2), TransposeKind.H)
    return bilinear_residual(m, exchange_matrix(m.rows), TransposeKind.T)


def _iso_adjoint(kind: IsoKind, v: DenseMatrix) -> DenseMatrix:
    return conj_transpose(v, TransposeKind.T if kind is IsoKind.REAL_PERPLECTIC else TransposeKind.H)


def structure_isomorphism(kind: IsoKind, m: DenseMatrix, direction: str = "forward") -> DenseMatrix:
    """
    Conjugação M ↦ V·M·V* (forward) ou V*·M·V (inverse).

    RealPerplectic: O(m₁,m₂) → perpléticas reais (GᵀEG = E);
    ComplexPerplectic: O(n,ℂ) → perpléticas complexas;
    ConjugateSymplectic: U(n,n) → Sp*(2n,ℂ) (GᴴJG = J).

    Raises:
        NotInGroup: M fora do grupo de origem (ou de destino, no inverso)
    """
    kind = IsoKind(kind)
    n = _require_square(m)
    v = iso_matrix(kind, n)
    v_adj = _iso_adjoint(kind, v)
    source = _iso_source(kind, n)
    tol = FACTOR_TOL * max(1, n)

    if direction == "forward":
        _require_member(source, m, kind.value)
        out = v @ m @ v_adj
        residual = _iso_target_residual(kind, out)
    elif direction == "inverse":
        residual = _iso_target_residual(kind, m)
        if residual > tol:
            raise NotInGroup(f"{kind.value}: entrada fora do grupo de destino (resíduo {residual:.3e})")
        out = v_adj @ m @ v
        residual = membership_residual(source, out)
    else:
        raise ValueError(f"direção inválida: {direction!r}")

    if residual > tol:
        raise NotInGroup(f"{kind.value}: imagem fora do grupo esperado (resíduo {residual:.3e})")
    return out


@dataclass(frozen=True, eq=False)
class StructuredSVD:
    """M = left·diag(values)·right."""

    left: DenseMatrix
    values: np.ndarray
    right: DenseMatrix

    def reconstruction(self) -> DenseMatrix:
        return self.left @ diagonal(self.values) @ self.right


def perplectic_svd(p_mat: DenseMatrix) -> StructuredSVD:
    """
    SVD estruturada de uma perplética real: P = O₁·Σ·O₂.

    O₁, O₂ perpléticas e ortogonais; Σ = diag(σ₁..σ_m, [1], 1/σ_m..1/σ₁).
    """
    p_mat = _coerce(p_mat, FieldTag.R)
    n = _require_square(p_mat)
    m1, m2 = (n + 1) // 2, n // 2
    v = iso_matrix(IsoKind.REAL_PERPLECTIC, n)
    vt = conj_transpose(v, TransposeKind.T)
    fe = hcsd(structure_isomorphism(IsoKind.REAL_PERPLECTIC, p_mat, "inverse"), 1, m1, m2)

    # inverte o bloco q para que H acople l com n−1−l
    perm = block_diag(identity(m1), exchange_matrix(m2))
    perm_t = conj_transpose(perm, TransposeKind.T)
    left = v @ fe.k1 @ perm_t @ vt
    middle = v @ perm @ fe.a @ perm_t @ vt
    right = v @ perm @ fe.k2 @ vt
    return StructuredSVD(left, np.diag(middle.data).copy(), right)


def conjugate_symplectic_svd(s_mat: DenseMatrix) -> StructuredSVD:
    """
    S = U·Σ·V para S simplética conjugada (SᴴJS = J).

    U, V simpléticas conjugadas e unitárias, Σ = diag(σ₁..σ_n, 1/σ₁..1/σ_n).
    A fase diag(I, iI) passa para os fatores unitários e deixa a imagem
    do meio diagonal.
    """
    s_mat = _coerce(s_mat, FieldTag.C)
    size = _require_square(s_mat)
    m = size // 2
    w = iso_matrix(IsoKind.CONJUGATE_SYMPLECTIC, size)
    wh = dagger(w)
    fe = hcsd(structure_isomorphism(IsoKind.CONJUGATE_SYMPLECTIC, s_mat, "inverse"), 2, m, m)

    phase = DenseMatrix(FieldTag.C, np.diag(np.concatenate([np.ones(m), 1j * np.ones(m)])))
    phase_inv = dagger(phase)
    left = w @ fe.k1 @ phase_inv @ wh
    middle = w @ phase @ fe.a @ phase_inv @ wh
    right = w @ phase @ fe.k2 @ wh
    return StructuredSVD(left, np.diag(middle.data).real.copy(), right)


def complex_perplectic_image(fe: FactoredElement) -> tuple[DenseMatrix, StructuredSVD]:
    """
    Leva um elemento F23 (ℂ) de O(n,ℂ) às perpléticas complexas.

    Os pares de B^i vão para as coordenadas (l, n−1−l) e o 1 isolado
    (n ímpar) para o centro; a imagem do meio fica diagonal.

    Returns:
        (imagem de g, SVD estruturada da imagem)
    """
    if (fe.spec.fid, fe.spec.beta) != ("F23", 2):
        raise NoDecomposition(f"imagem perplética complexa definida para F23/C, recebeu {fe.spec.cell_id}")
    n = fe.g.rows
    start = n % 2
    sigma = np.empty(n, dtype=int)
    if start:
        sigma[n // 2] = 0
    for l in range(n // 2):
        sigma[l] = start + 2 * l
        sigma[n - 1 - l] = start + 2 * l + 1
    perm = np.zeros((n, n))
    perm[np.arange(n), sigma] = 1.0
    pi = DenseMatrix(FieldTag.R, perm)
    pi_t = conj_transpose(pi, TransposeKind.T)

    v = iso_matrix(IsoKind.COMPLEX_PERPLECTIC, n)
    vh = dagger(v)
    image = lambda m: v @ pi @ m @ pi_t @ vh  # noqa: E731
    middle = image(fe.a)
    svd = StructuredSVD(image(fe.k1), np.diag(middle.data).real.copy(), image(fe.k2))
    return image(fe.g), svd


# ============================================================
# DESPACHO
# ============================================================


def _csd_for(spec_: FactorizationSpec, g: DenseMatrix) -> FactoredElement:
    par = spec_.params_dict()
    return csd(g, spec_.beta, par["p"], par["q"], par["r"], par["s"])


DECOMPOSABLE: dict[tuple[str, int], Callable[[FactorizationSpec, DenseMatrix], FactoredElement]] = {
    ("F1", 2): lambda s, g: odo(g),
    ("F4", 1): _csd_for,
    ("F4", 2): _csd_for,
    ("F7", 1): lambda s, g: svd_factor(g, 1),
    ("F7", 2): lambda s, g: svd_factor(g, 2),
    ("F7", 4): lambda s, g: svd_factor(g, 4),
    ("F9", 1): lambda s, g: hsvd(g, 1, s.param("p"), s.param("q")),
    ("F9", 2): lambda s, g: hsvd(g, 2, s.param("p"), s.param("q")),
    ("F10", 1): lambda s, g: sympl_svd(g),
    ("F13", 2): lambda s, g: uso_factor(g),
    ("F18", 1): lambda s, g: hcsd(g, 1, s.param("p"), s.param("q")),
    ("F18", 2): lambda s, g: hcsd(g, 2, s.param("p"), s.param("q")),
}


def decompose(spec_: FactorizationSpec, g: DenseMatrix) -> FactoredElement:
    """
    Decompõe g segundo a célula spec_.

    Raises:
        NoDecomposition: célula só de composição
    """
    routine = DECOMPOSABLE.get((spec_.fid, spec_.beta))
    if routine is None:
        raise NoDecomposition(f"{spec_.cell_id} não tem algoritmo de decomposição (apenas composição)")
    if g.shape != (spec_.size, spec_.size):
        raise ShapeMismatch(f"{spec_.cell_id} espera {spec_.size}x{spec_.size}, recebeu {g.rows}x{g.cols}")
    return routine(spec_, g)
