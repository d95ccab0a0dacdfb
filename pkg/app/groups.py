"""
Grupos de Lie clássicos — os 13 grupos G*·J·G = J sobre ℝ, ℂ e ℍ.

Contém:
    - GroupId e o par definidor (transposta, J) de cada família
    - Resíduo de pertinência (com representações realify/complexify)
    - Amostradores da álgebra de Lie e do grupo (exp da álgebra)
    - Involuções τ(X) = s·M·op(X)·M⁻¹ na álgebra e sua ação no grupo
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from app.config import DEFAULT_SCALE, GL_MARGIN
from app.errors import InvalidParameter, ShapeMismatch, UnknownInvolution, WrongField
from app.numeric import (
    DenseMatrix,
    FieldTag,
    Quaternion,
    TransposeKind,
    block_diag,
    block_matrix,
    complexify,
    conj_transpose,
    dagger_kind,
    decomplexify,
    derealify,
    diagonal,
    entry_conjugate,
    exp_matrix,
    identity,
    inverse,
    realify,
    scalar_matrix,
    signature_matrix,
    singular_values,
    symplectic_form,
)

logger = logging.getLogger(__name__)

# ============================================================
# IDENTIFICAÇÃO DOS GRUPOS
# ============================================================


class GroupFamily(str, Enum):
    GL = "GL"
    U = "U"
    UPQ = "Upq"
    SP = "Sp"
    ORTH = "Orth"


class Representation(str, Enum):
    NATIVE = "native"
    REALIFIED = "realified"
    COMPLEXIFIED = "complexified"


_FAMILY_FIELDS = {
    GroupFamily.GL: {FieldTag.R, FieldTag.C, FieldTag.H},
    GroupFamily.U: {FieldTag.R, FieldTag.C, FieldTag.H},
    GroupFamily.UPQ: {FieldTag.R, FieldTag.C, FieldTag.H},
    GroupFamily.SP: {FieldTag.R, FieldTag.C},
    GroupFamily.ORTH: {FieldTag.C, FieldTag.H},
}


@dataclass(frozen=True)
class GroupId:
    """
    Um dos 13 grupos clássicos.

    n é a dimensão da matriz, exceto em Sp (n = metade, matriz 2n) e em
    Upq (n = p + q). unit escolhe o η de O_η(n, ℍ).
    """

    family: GroupFamily
    field: FieldTag
    n: int = 0
    p: int = 0
    q: int = 0
    representation: Representation = Representation.NATIVE
    unit: str = "j"

    def __post_init__(self):
        family = GroupFamily(self.family)
        fld = FieldTag(self.field)
        rep = Representation(self.representation)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "field", fld)
        object.__setattr__(self, "representation", rep)
        if fld not in _FAMILY_FIELDS[family]:
            raise WrongField(f"{family.value} não existe sobre {fld.value}")
        if rep is Representation.REALIFIED and fld is not FieldTag.C:
            raise WrongField("realify só se aplica a grupos complexos")
        if rep is Representation.COMPLEXIFIED and fld is not FieldTag.H:
            raise WrongField("complexify só se aplica a grupos quaterniônicos")
        if family is GroupFamily.UPQ:
            object.__setattr__(self, "n", self.p + self.q)
        if min(self.n, self.p, self.q) < 0:
            raise InvalidParameter(f"dimensões negativas em {family.value}")
        if self.unit not in ("i", "j", "k"):
            raise InvalidParameter(f"unidade inválida: {self.unit!r}")

    @property
    def native_size(self) -> int:
        return 2 * self.n if self.family is GroupFamily.SP else self.n

    @property
    def size(self) -> int:
        return self.native_size * (1 if self.representation is Representation.NATIVE else 2)

    @property
    def matrix_field(self) -> FieldTag:
        """Corpo das matrizes que representam o grupo."""
        return {
            Representation.NATIVE: self.field,
            Representation.REALIFIED: FieldTag.R,
            Representation.COMPLEXIFIED: FieldTag.C,
        }[self.representation]

    def native(self) -> "GroupId":
        return GroupId(self.family, self.field, self.n, self.p, self.q, Representation.NATIVE, self.unit)

    def label(self) -> str:
        f = self.field.value
        if self.family is GroupFamily.GL:
            name = f"GL({self.n},{f})"
        elif self.family is GroupFamily.U:
            name = {FieldTag.R: f"O({self.n})", FieldTag.C: f"U({self.n})"}.get(self.field, f"U({self.n},H)")
        elif self.family is GroupFamily.UPQ:
            base = {FieldTag.R: "O", FieldTag.C: "U"}.get(self.field, "U")
            name = f"{base}({self.p},{self.q}{',H' if self.field is FieldTag.H else ''})"
        elif self.family is GroupFamily.SP:
            name = f"Sp({2 * self.n},{f})"
        else:
            prefix = "O" if self.field is FieldTag.C or self.unit == "j" else f"O_{self.unit}"
            name = f"{prefix}({self.n},{f})"
        if self.representation is Representation.REALIFIED:
            return f"realify({name})"
        if self.representation is Representation.COMPLEXIFIED:
            return f"complexify({name})"
        return name


def gl_group(n: int, fld: FieldTag) -> GroupId:
    return GroupId(GroupFamily.GL, fld, n)


def unitary_group(n: int, fld: FieldTag) -> GroupId:
    return GroupId(GroupFamily.U, fld, n)


def indefinite_group(p: int, q: int, fld: FieldTag) -> GroupId:
    return GroupId(GroupFamily.UPQ, fld, p=p, q=q)


def symplectic_group(n: int, fld: FieldTag) -> GroupId:
    return GroupId(GroupFamily.SP, fld, n)


def orthogonal_group(n: int, fld: FieldTag, unit: str = "j") -> GroupId:
    return GroupId(GroupFamily.ORTH, fld, n, unit=unit)


# ============================================================
# PAR DEFINIDOR E PERTINÊNCIA
# ============================================================


@dataclass(frozen=True)
class DefiningPair:
    """(transposta, J) com G*·J·G = J; GL não tem par (None, None)."""

    transpose: TransposeKind | None
    j: DenseMatrix | None


def defining_pair(group: GroupId) -> DefiningPair:
    g = group.native()
    fam = g.family
    if fam is GroupFamily.GL:
        return DefiningPair(None, None)
    if fam is GroupFamily.U:
        return DefiningPair(dagger_kind(g.field), identity(g.n))
    if fam is GroupFamily.UPQ:
        return DefiningPair(dagger_kind(g.field), signature_matrix(g.p, g.q))
    if fam is GroupFamily.SP:
        return DefiningPair(TransposeKind.T, symplectic_form(g.n))
    kind = TransposeKind.T if g.field is FieldTag.C else TransposeKind.eta(g.unit)
    return DefiningPair(kind, identity(g.n))


def bilinear_residual(m: DenseMatrix, j: DenseMatrix, kind: TransposeKind) -> float:
    """‖M^kind·J·M − J‖_F."""
    return (conj_transpose(m, kind) @ j @ m - j).norm()


def _native_residual(group: GroupId, m: DenseMatrix, margin: float) -> float:
    pair = defining_pair(group)
    if pair.transpose is None:
        if m.rows == 0:
            return 0.0
        sv = singular_values(m)
        return 0.0 if sv[-1] > margin * m.norm() else float("inf")
    return bilinear_residual(m, pair.j, pair.transpose)


def membership_residual(group: GroupId, m: DenseMatrix, margin: float = GL_MARGIN) -> float:
    """
    Resíduo de pertinência ‖M*·J·M − J‖_F.

    Para GL devolve 0 se σ_min/‖M‖_F > margin e inf caso contrário. Nas
    representações realify/complexify soma o resíduo nativo da matriz
    desfeita e o desvio ‖map(unmap(M)) − M‖.

    Raises:
        ShapeMismatch: dimensão ou corpo incompatível com o grupo
    """
    if m.shape != (group.size, group.size):
        raise ShapeMismatch(f"{group.label()} espera {group.size}x{group.size}, recebeu {m.rows}x{m.cols}")
    if m.field.beta > group.matrix_field.beta:
        raise ShapeMismatch(f"{group.label()} espera corpo {group.matrix_field.value}, recebeu {m.field.value}")
    m = m.promote(group.matrix_field)
    if group.representation is Representation.REALIFIED:
        native = derealify(m)
        return _native_residual(group, native, margin) + (realify(native) - m).norm()
    if group.representation is Representation.COMPLEXIFIED:
        native = decomplexify(m)
        return _native_residual(group, native, margin) + (complexify(native) - m).norm()
    return _native_residual(group, m, margin)


# ============================================================
# AMOSTRADORES
# ============================================================


def _gaussian(rows: int, cols: int, fld: FieldTag, rng: np.random.Generator) -> DenseMatrix:
    if fld is FieldTag.H:
        return DenseMatrix(fld, rng.standard_normal((rows, cols, 4)))
    if fld is FieldTag.C:
        return DenseMatrix(fld, rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols)))
    return DenseMatrix(fld, rng.standard_normal((rows, cols)))


def _skew(n: int, fld: FieldTag, rng: np.random.Generator, kind: TransposeKind | None = None) -> DenseMatrix:
    g = _gaussian(n, n, fld, rng)
    return g - conj_transpose(g, kind or dagger_kind(fld))


def sample_algebra(group: GroupId, rng: np.random.Generator, scale: float = DEFAULT_SCALE) -> DenseMatrix:
    """
    Elemento aleatório da álgebra de Lie, multiplicado por scale.

    GL: gaussiana; U: g − g†; U(p,q): [[a, b], [b†, c]] com a, c
    anti-hermitianas; Sp: [[a, b], [c, −aᵀ]] com b, c simétricas;
    O(n,ℂ)/O_η(n,ℍ): g − g^T / g − g^{D_η}.
    """
    g = group.native()
    fld = g.field
    if g.family is GroupFamily.GL:
        x = _gaussian(g.n, g.n, fld, rng)
    elif g.family is GroupFamily.U:
        x = _skew(g.n, fld, rng)
    elif g.family is GroupFamily.UPQ:
        b = _gaussian(g.p, g.q, fld, rng)
        x = block_matrix([[_skew(g.p, fld, rng), b], [conj_transpose(b, dagger_kind(fld)), _skew(g.q, fld, rng)]])
    elif g.family is GroupFamily.SP:
        a = _gaussian(g.n, g.n, fld, rng)
        b = _gaussian(g.n, g.n, fld, rng)
        c = _gaussian(g.n, g.n, fld, rng)
        t = TransposeKind.T
        x = block_matrix([[a, b + conj_transpose(b, t)], [c + conj_transpose(c, t), -conj_transpose(a, t)]])
    else:
        kind = TransposeKind.T if fld is FieldTag.C else TransposeKind.eta(g.unit)
        x = _skew(g.n, fld, rng, kind)
    x = x.promote(fld) * scale
    return _represent(group, x)


def _represent(group: GroupId, m: DenseMatrix) -> DenseMatrix:
    if group.representation is Representation.REALIFIED:
        return realify(m)
    if group.representation is Representation.COMPLEXIFIED:
        return complexify(m)
    return m


def sample_group(group: GroupId, rng: np.random.Generator, scale: float = DEFAULT_SCALE) -> DenseMatrix:
    """exp de uma amostra da álgebra (nativa), levada à representação do grupo."""
    x = sample_algebra(group.native(), rng, scale)
    return _represent(group, exp_matrix(x))


# ============================================================
# INVOLUÇÕES
# ============================================================


class InvolutionFormula(str, Enum):
    NEG_TRANSPOSE = "-X^T"
    NEG_DAGGER = "-X^†"
    NEG_ETA_TRANSPOSE = "-X^{D_η}"
    CONJ_BY_IPQ = "I_{p,q} X I_{p,q}"
    CONJ_BY_SIGNS = "S X S"
    NEG_IPQ_DAGGER = "-I_{p,q} X^† I_{p,q}"
    CONJ_BY_JN = "-J X J"
    CONJ_BY_JN_BAR = "-J conj(X) J"
    JN_TRANSPOSE = "J X^T J"
    ENTRY_CONJ = "conj(X)"
    CONJ_BY_UNIT = "-η X η"
    CONJ_BY_JPJQ = "-D X D, D = diag(J_p, J_q)"
    CONJ_BY_JPJQ_BAR = "-D conj(X) D, D = diag(J_p, J_q)"


@dataclass(frozen=True)
class InvolutionId:
    """
    Involução da álgebra de Lie de uma linha do catálogo.

    params depende da fórmula: (p, q) para I_{p,q} e diag(J_p, J_q),
    (n,) para J_n; signs é a lista de (tamanho, ±1) de S em CONJ_BY_SIGNS.
    """

    formula: InvolutionFormula
    params: tuple[int, ...] = ()
    unit: str = "i"
    signs: tuple[tuple[int, int], ...] = field(default=())

    def label(self) -> str:
        text = InvolutionFormula(self.formula).value
        return text.replace("η", self.unit)


@dataclass(frozen=True)
class _Action:
    op: str  # "id", "conj" ou "transpose"
    kind: TransposeKind | None
    m: DenseMatrix | None
    m_inv: DenseMatrix | None

    @property
    def anti(self) -> bool:
        return self.op == "transpose"


def _sign_matrix(signs: tuple[tuple[int, int], ...]) -> DenseMatrix:
    return diagonal(np.concatenate([np.full(size, float(sign)) for size, sign in signs] + [np.zeros(0)]))


def _action(inv: InvolutionId, x: DenseMatrix) -> _Action:
    f = InvolutionFormula(inv.formula)
    fld = x.field
    try:
        if f is InvolutionFormula.NEG_TRANSPOSE:
            return _Action("transpose", TransposeKind.T, None, None)
        if f is InvolutionFormula.NEG_DAGGER:
            return _Action("transpose", dagger_kind(fld), None, None)
        if f is InvolutionFormula.NEG_ETA_TRANSPOSE:
            return _Action("transpose", TransposeKind.eta(inv.unit), None, None)
        if f is InvolutionFormula.CONJ_BY_IPQ:
            s = signature_matrix(*inv.params)
            return _Action("id", None, s, s)
        if f is InvolutionFormula.CONJ_BY_SIGNS:
            s = _sign_matrix(inv.signs)
            return _Action("id", None, s, s)
        if f is InvolutionFormula.NEG_IPQ_DAGGER:
            s = signature_matrix(*inv.params)
            return _Action("transpose", dagger_kind(fld), s, s)
        if f in (InvolutionFormula.CONJ_BY_JN, InvolutionFormula.CONJ_BY_JN_BAR):
            j = symplectic_form(*inv.params)
            return _Action("id" if f is InvolutionFormula.CONJ_BY_JN else "conj", None, j, -j)
        if f is InvolutionFormula.JN_TRANSPOSE:
            j = symplectic_form(*inv.params)
            return _Action("transpose", TransposeKind.T, j, -j)
        if f is InvolutionFormula.ENTRY_CONJ:
            return _Action("conj", None, None, None)
        if f is InvolutionFormula.CONJ_BY_UNIT:
            eta = Quaternion.unit(inv.unit)
            return _Action("id", None, scalar_matrix(-eta, x.rows), scalar_matrix(eta, x.rows))
        if f in (InvolutionFormula.CONJ_BY_JPJQ, InvolutionFormula.CONJ_BY_JPJQ_BAR):
            p, q = inv.params
            d = block_diag(symplectic_form(p), symplectic_form(q))
            return _Action("id" if f is InvolutionFormula.CONJ_BY_JPJQ else "conj", None, d, -d)
    except (TypeError, ValueError) as e:
        raise UnknownInvolution(f"parâmetros inválidos para {f.value}: {inv.params}") from e
    raise UnknownInvolution(f"fórmula desconhecida: {inv.formula}")


def _apply_op(action: _Action, x: DenseMatrix) -> DenseMatrix:
    if action.op == "conj":
        if x.field is FieldTag.H:
            raise UnknownInvolution("conjugação entrada a entrada não se aplica a ℍ")
        return entry_conjugate(x)
    if action.op == "transpose":
        return conj_transpose(x, action.kind)
    return x


def _conjugate_by(action: _Action, y: DenseMatrix) -> DenseMatrix:
    if action.m is None:
        return y
    if action.m.rows != y.rows:
        raise ShapeMismatch(f"involução de tamanho {action.m.rows} aplicada a {y.rows}x{y.cols}")
    return action.m @ y @ action.m_inv


def involution(inv: InvolutionId, x: DenseMatrix) -> DenseMatrix:
    """
    Ação na álgebra: τ(X) = s·M·op(X)·M⁻¹, s = −1 para as transpostas.

    Raises:
        UnknownInvolution: fórmula ou parâmetros incompatíveis com X
    """
    action = _action(inv, x)
    y = _conjugate_by(action, _apply_op(action, x)).promote(x.field)
    return -y if action.anti else y


def group_involution(inv: InvolutionId, g: DenseMatrix) -> DenseMatrix:
    """Ação no grupo: Θ(g) = M·op(g)·M⁻¹, ou M·op(g)⁻¹·M⁻¹ para as transpostas."""
    action = _action(inv, g)
    y = _apply_op(action, g)
    if action.anti:
        y = inverse(y)
    return _conjugate_by(action, y).promote(g.field)


def split_eigenspaces(x: DenseMatrix, inv: InvolutionId) -> tuple[DenseMatrix, DenseMatrix]:
    """(k, p) = ((X + τX)/2, (X − τX)/2)."""
    tx = involution(inv, x)
    return (x + tx) * 0.5, (x - tx) * 0.5
