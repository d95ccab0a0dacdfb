"""
Templates do fator do meio.

Contém:
    - AngleVector e seus domínios (compacto [0,π), [0,π/2) ou real)
    - Matrizes auxiliares C, S, D, R, Ch, Sh, Σ, B^η e H_{m,n}
    - Permutações de blocos (P_{p,q}, P₁, P₂)
    - middle_factor: monta a(θ) a partir do template de cada linha do catálogo
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

from app.errors import DomainViolation, InvalidParameter, SizeMismatch
from app.numeric import DenseMatrix, FieldTag, block_diag, conj_transpose, from_unit_parts, TransposeKind

if TYPE_CHECKING:
    from app.registry import FactorizationSpec

logger = logging.getLogger(__name__)

# ============================================================
# ÂNGULOS
# ============================================================


class AngleDomain(str, Enum):
    ZERO_PI = "ZeroPi"
    ZERO_HALF_PI = "ZeroHalfPi"
    REAL_CANONICAL = "RealCanonical"

    @property
    def is_compact(self) -> bool:
        return self is not AngleDomain.REAL_CANONICAL

    @property
    def upper(self) -> float:
        return {"ZeroPi": np.pi, "ZeroHalfPi": np.pi / 2}.get(self.value, np.inf)


@dataclass(frozen=True)
class AngleVector:
    values: tuple[float, ...]
    domain: AngleDomain

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in np.ravel(self.values)))
        object.__setattr__(self, "domain", AngleDomain(self.domain))

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def violations(self) -> int:
        """Quantos ângulos estão fora do domínio."""
        t = self.as_array()
        if not self.domain.is_compact:
            return int(np.count_nonzero(~np.isfinite(t)))
        return int(np.count_nonzero(~((t >= 0) & (t < self.domain.upper))))

    def canonical(self, reflect: bool = False) -> "AngleVector":
        """
        Forma canônica: ordenação decrescente.

        reflect=True troca θ por |θ| antes de ordenar; só vale para
        templates em que o sinal é uma simetria (Ch/Sh, B^η).
        """
        t = self.as_array()
        if reflect:
            t = np.abs(t)
        return AngleVector(tuple(np.sort(t)[::-1]), self.domain)


# ============================================================
# MATRIZES AUXILIARES
# ============================================================


class AuxKind(str, Enum):
    C = "C"
    S = "S"
    D = "D"
    R = "R"
    CH = "Ch"
    SH = "Sh"
    SIGMA = "Sigma"
    B = "B"
    H = "H"


def _rotation_blocks(theta: np.ndarray, n: int, diag_fn, off_fn) -> tuple[np.ndarray, np.ndarray]:
    """
    Parte real e coeficiente de blocos 2×2 [[d, o], [−o, d]] na diagonal.

    Com n ímpar o primeiro elemento é 1 e os blocos começam na posição 1.
    """
    real = np.eye(n)
    coeff = np.zeros((n, n))
    start = n % 2
    for l, t in enumerate(theta):
        i = start + 2 * l
        real[i, i] = real[i + 1, i + 1] = diag_fn(t)
        s = off_fn(t)
        coeff[i, i + 1] = s
        coeff[i + 1, i] = -s
    return real, coeff


def hyperbolic_layout(m: int, theta: np.ndarray) -> np.ndarray:
    """H_{m,n}: [[Ch_n, 0, Sh_n], [0, I_{m−n}, 0], [Sh_n, 0, Ch_n]], m ≥ n = len(θ)."""
    k = len(theta)
    if m < k:
        raise SizeMismatch(f"H_{{m,n}} exige m ≥ n, recebido m={m}, n={k}")
    out = np.eye(m + k)
    idx = np.arange(k)
    last = m + idx
    out[idx, idx] = out[last, last] = np.cosh(theta)
    out[idx, last] = out[last, idx] = np.sinh(theta)
    return out


def aux_matrix(kind: AuxKind, theta, n: int | None = None, m: int | None = None, eta: str = "i") -> DenseMatrix:
    """
    Matrizes auxiliares dos templates.

    Args:
        kind: tipo da matriz
        theta: ângulos (sequência ou AngleVector)
        n: dimensão para R e B (⌊n/2⌋ ângulos)
        m: primeiro índice de H_{m,n} (n = número de ângulos)
        eta: unidade imaginária de D e B ("i", "j" ou "k")
    """
    kind = AuxKind(kind)
    t = theta.as_array() if isinstance(theta, AngleVector) else np.asarray(theta, dtype=float).ravel()

    simple = {
        AuxKind.C: np.cos,
        AuxKind.S: np.sin,
        AuxKind.CH: np.cosh,
        AuxKind.SH: np.sinh,
        AuxKind.SIGMA: np.exp,
    }
    if kind in simple:
        return DenseMatrix(FieldTag.R, np.diag(simple[kind](t)))
    if kind is AuxKind.D:
        return from_unit_parts(np.diag(np.cos(t)), np.diag(np.sin(t)), eta)
    if kind is AuxKind.H:
        if m is None:
            raise InvalidParameter("H_{m,n} precisa de m")
        return DenseMatrix(FieldTag.R, hyperbolic_layout(m, t))

    if n is None:
        raise InvalidParameter(f"{kind.value} precisa da dimensão n")
    if len(t) != n // 2:
        raise SizeMismatch(f"{kind.value} de dimensão {n} precisa de {n // 2} ângulos, recebeu {len(t)}")
    if kind is AuxKind.R:
        real, coeff = _rotation_blocks(t, n, np.cos, np.sin)
        return DenseMatrix(FieldTag.R, real + coeff)
    real, coeff = _rotation_blocks(t, n, np.cosh, np.sinh)
    return from_unit_parts(real, coeff, eta)


# ============================================================
# PERMUTAÇÕES DE BLOCOS
# ============================================================


class PermKind(str, Enum):
    PPQ = "Ppq"
    P1 = "P1"
    P2 = "P2"


# (blocos de origem, ordem em que aparecem no destino)
_PERM_LAYOUT = {
    PermKind.PPQ: (lambda p, q: (p, p, q, q), (0, 2, 1, 3)),
    PermKind.P1: (lambda p1, q1, p2, q2: (p1, q1, p2, q2), (0, 2, 1, 3)),
    PermKind.P2: (lambda p1, q1, p2, q2: (p1, q2, p2, q1), (0, 2, 3, 1)),
}


def permutation_order(kind: PermKind, *sizes: int) -> np.ndarray:
    """Vetor σ tal que (PᵀAP)[i, j] = A[σ(i), σ(j)]."""
    kind = PermKind(kind)
    block_sizes, order = _PERM_LAYOUT[kind]
    try:
        blocks = block_sizes(*sizes)
    except TypeError:
        raise SizeMismatch(f"{kind.value} recebeu tamanhos {sizes}") from None
    if any(b < 0 for b in blocks):
        raise SizeMismatch(f"tamanhos negativos em {kind.value}: {sizes}")
    offsets = np.concatenate([[0], np.cumsum(blocks)])
    return np.concatenate([np.arange(offsets[b], offsets[b + 1]) for b in order]).astype(int)


def block_permutation(kind: PermKind, *sizes: int) -> DenseMatrix:
    sigma = permutation_order(kind, *sizes)
    n = len(sigma)
    out = np.zeros((n, n))
    out[sigma, np.arange(n)] = 1.0
    return DenseMatrix(FieldTag.R, out)


# ============================================================
# TEMPLATES DO FATOR DO MEIO
# ============================================================


class MiddleTemplate(str, Enum):
    TORUS = "diag(e^{ηθ})"
    ROTATION_PAIR = "diag(R, R^-1)"
    TORUS_PAIR = "diag(D, D)"
    CS = "CS"
    CS_UNIT = "CS with η"
    CS_KRON = "CS ⊗ I_2"
    SIGMA = "Σ"
    HYPERBOLIC = "H_{p,q}"
    SIGMA_PAIR = "diag(Σ, Σ)"
    SIGMA_INVERSE_PAIR = "diag(Σ, Σ^-1)"
    BOOST = "B^η"
    CH_SH = "[[Ch, Sh], [Sh, Ch]]"
    HYPERBOLIC_PAIR = "diag(H, H^-1)"
    CH_SH_UNIT = "[[Ch, ηSh], [−ηSh, Ch]]"
    HYPERBOLIC_PERMUTED = "P2ᵀ diag(H^θ, H^γ) P2"
    HYPERBOLIC_UNIT = "H_{p,q} with η"
    HYPERBOLIC_DOUBLED = "H_{p,q} doubled"


def _cs(t: np.ndarray, p: int, q: int, s: int) -> np.ndarray:
    n = p + q
    out = np.eye(n)
    idx = np.arange(s)
    last = n - s + idx
    out[idx, idx] = out[last, last] = np.cos(t)
    out[idx, last] = np.sin(t)
    out[last, idx] = -np.sin(t)
    return out


def _coupled(t: np.ndarray, p: int, diag_fn, off_fn, lower_sign: float) -> tuple[np.ndarray, np.ndarray]:
    """Parte real e coeficiente do acoplamento entre as coordenadas l e p+l."""
    k = len(t)
    real = np.eye(p + k)
    coeff = np.zeros((p + k, p + k))
    idx = np.arange(k)
    last = p + idx
    real[idx, idx] = real[last, last] = diag_fn(t)
    coeff[idx, last] = off_fn(t)
    coeff[last, idx] = lower_sign * off_fn(t)
    return real, coeff


def _cs_kron(t: np.ndarray, p: int, q: int) -> np.ndarray:
    n = p + q
    out = np.eye(2 * n)
    c = np.kron(np.diag(np.cos(t)), np.eye(2))
    s = np.kron(np.diag(np.sin(t)), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    a = p - q
    out[a:n, a:n] = c
    out[2 * p :, 2 * p :] = c
    out[a:n, 2 * p :] = s
    out[2 * p :, a:n] = s
    return out


def _hyperbolic_doubled(t: np.ndarray, p: int, q: int) -> np.ndarray:
    """
    Meio de O(2p,2q)/U(2p,2q) em coordenadas (p, p, q, q).

    Cada ângulo acopla as posições p−q+l ↔ 2p+l com +sinh e
    2p−q+l ↔ 2p+q+l com −sinh.
    """
    out = np.eye(2 * (p + q))
    l = np.arange(q)
    a, b, c, d = p - q + l, 2 * p - q + l, 2 * p + l, 2 * p + q + l
    ch, sh = np.cosh(t), np.sinh(t)
    out[a, a] = out[b, b] = out[c, c] = out[d, d] = ch
    out[a, c] = out[c, a] = sh
    out[b, d] = out[d, b] = -sh
    return out


def build_middle(spec: "FactorizationSpec", theta) -> DenseMatrix:
    """Monta a(θ) sem validar domínio nem contagem (uso interno e decomposições)."""
    t = theta.as_array() if isinstance(theta, AngleVector) else np.asarray(theta, dtype=float).ravel()
    tpl = spec.template
    par = spec.param
    unit = spec.unit

    if tpl is MiddleTemplate.TORUS:
        out = aux_matrix(AuxKind.D, t, eta=unit)
    elif tpl is MiddleTemplate.ROTATION_PAIR:
        r = aux_matrix(AuxKind.R, t, n=par("n"))
        out = block_diag(r, conj_transpose(r, TransposeKind.T))
    elif tpl is MiddleTemplate.TORUS_PAIR:
        d = aux_matrix(AuxKind.D, t, eta=unit)
        out = block_diag(d, d)
    elif tpl is MiddleTemplate.CS:
        out = DenseMatrix(FieldTag.R, _cs(t, par("p"), par("q"), par("s")))
    elif tpl is MiddleTemplate.CS_UNIT:
        out = from_unit_parts(*_coupled(t, par("p"), np.cos, np.sin, +1.0), unit)
    elif tpl is MiddleTemplate.CS_KRON:
        out = DenseMatrix(FieldTag.R, _cs_kron(t, par("p"), par("q")))
    elif tpl is MiddleTemplate.SIGMA:
        out = aux_matrix(AuxKind.SIGMA, t)
    elif tpl is MiddleTemplate.HYPERBOLIC:
        out = aux_matrix(AuxKind.H, t, m=par("p"))
    elif tpl is MiddleTemplate.SIGMA_PAIR:
        s = aux_matrix(AuxKind.SIGMA, t)
        out = block_diag(s, s)
    elif tpl is MiddleTemplate.SIGMA_INVERSE_PAIR:
        out = block_diag(aux_matrix(AuxKind.SIGMA, t), aux_matrix(AuxKind.SIGMA, -t))
    elif tpl is MiddleTemplate.BOOST:
        out = aux_matrix(AuxKind.B, t, n=par("n"), eta=unit)
    elif tpl is MiddleTemplate.CH_SH:
        real, coeff = _coupled(t, par("n"), np.cosh, np.sinh, +1.0)
        out = DenseMatrix(FieldTag.R, real + coeff)
    elif tpl is MiddleTemplate.CH_SH_UNIT:
        out = from_unit_parts(*_coupled(t, par("n"), np.cosh, np.sinh, -1.0), unit)
    elif tpl is MiddleTemplate.HYPERBOLIC_PAIR:
        p = par("p")
        out = block_diag(aux_matrix(AuxKind.H, t, m=p), aux_matrix(AuxKind.H, -t, m=p))
    elif tpl is MiddleTemplate.HYPERBOLIC_UNIT:
        out = from_unit_parts(*_coupled(t, par("p"), np.cosh, np.sinh, -1.0), unit)
    elif tpl is MiddleTemplate.HYPERBOLIC_DOUBLED:
        out = DenseMatrix(FieldTag.R, _hyperbolic_doubled(t, par("p"), par("q")))
    elif tpl is MiddleTemplate.HYPERBOLIC_PERMUTED:
        p1, q1, p2, q2 = par("p1"), par("q1"), par("p2"), par("q2")
        m1 = min(p1, q2)
        first = hyperbolic_layout(max(p1, q2), t[:m1])
        second = hyperbolic_layout(max(p2, q1), t[m1:])
        inner = block_diag(DenseMatrix(FieldTag.R, first), DenseMatrix(FieldTag.R, second))
        perm = block_permutation(PermKind.P2, p1, q1, p2, q2)
        out = conj_transpose(perm, TransposeKind.T) @ inner @ perm
    else:
        raise InvalidParameter(f"template desconhecido: {tpl}")

    return out.promote(spec.ambient.matrix_field)


def middle_factor(spec: "FactorizationSpec", theta: AngleVector) -> DenseMatrix:
    """
    a(θ) de uma linha do catálogo, já no corpo do grupo ambiente.

    Raises:
        SizeMismatch: número de ângulos diferente de spec.angle_count
        DomainViolation: ângulo fora do domínio da linha
    """
    if not isinstance(theta, AngleVector):
        theta = AngleVector(theta, spec.angle_domain)
    if len(theta) != spec.angle_count:
        raise SizeMismatch(f"{spec.cell_id} espera {spec.angle_count} ângulos, recebeu {len(theta)}")
    if theta.domain is not spec.angle_domain:
        raise DomainViolation(f"{spec.cell_id} usa domínio {spec.angle_domain.value}, recebeu {theta.domain.value}")
    bad = theta.violations()
    if bad:
        raise DomainViolation(f"{spec.cell_id}: {bad} ângulo(s) fora de {spec.angle_domain.value}")
    return build_middle(spec, theta)
