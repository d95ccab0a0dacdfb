"""
Catálogo das 53 fatorações K₁AK₂ (25 famílias × variantes de β).

Cada célula (fid, β) tem grupo ambiente, dois subgrupos com a receita de
mergulho, template do fator do meio e o par de involuções (σ fixa Lie(K₁),
τ fixa Lie(K₂)). Aqui também ficam a composição g = k₁·a(θ)·k₂, a
amostragem construtiva e as verificações de consistência do catálogo.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import partial

import numpy as np

from app.config import (
    DEFAULT_SCALE,
    GENERATOR_STEP,
    GENERATOR_TOL,
    HYPERBOLIC_SAMPLE_MAX,
    INVOLUTION_TOL,
    MEMBERSHIP_TOL,
)
from app.errors import BadPartition, EmptyCell, InvalidParameter, MembershipFailure, SizeMismatch
from app.groups import (
    GroupId,
    InvolutionFormula,
    InvolutionId,
    gl_group,
    indefinite_group,
    involution,
    membership_residual,
    orthogonal_group,
    sample_algebra,
    sample_group,
    symplectic_group,
    unitary_group,
)
from app.numeric import (
    DenseMatrix,
    FieldTag,
    TransposeKind,
    block_diag,
    commutator,
    complexify,
    conj_transpose,
    identity,
    inverse,
    realify,
)
from app.templates import (
    AngleDomain,
    AngleVector,
    MiddleTemplate,
    PermKind,
    block_permutation,
    build_middle,
    middle_factor,
)

logger = logging.getLogger(__name__)

R, C, H = FieldTag.R, FieldTag.C, FieldTag.H

# ============================================================
# TABELA DE CÉLULAS
# ============================================================

# fid → valores de β com célula não vazia
TABLE: dict[str, tuple[int, ...]] = {
    "F1": (2, 4),
    "F2": (1, 2),
    "F3": (2,),
    "F4": (1, 2, 4),
    "F5": (2, 4),
    "F6": (1, 2),
    "F7": (1, 2, 4),
    "F8": (1, 2, 4),
    "F9": (1, 2, 4),
    "F10": (1, 2),
    "F11": (1, 2),
    "F12": (2, 4),
    "F13": (2, 4),
    "F14": (1, 2),
    "F15": (1, 2),
    "F16": (1, 2),
    "F17": (2,),
    "F18": (1, 2, 4),
    "F19": (1, 2, 4),
    "F20": (1, 2),
    "F21": (1, 2),
    "F22": (2, 4),
    "F23": (2, 4),
    "F24": (2, 4),
    "F25": (2,),
}

REQUIRED_PARAMS: dict[str, tuple[str, ...]] = {
    "F4": ("p", "q", "r", "s"),
    "F19": ("p1", "q1", "p2", "q2"),
    **{fid: ("p", "q") for fid in ("F5", "F6", "F8", "F9", "F16", "F18", "F20", "F22", "F24")},
}

# famílias cujo grupo ambiente tem dimensão 2n
DOUBLED = {"F2", "F3", "F6", "F10", "F11", "F14", "F15", "F16", "F17", "F20", "F21", "F25"}

# famílias com p ≥ q obrigatório
_P_GE_Q = {"F5", "F6", "F8", "F16", "F18", "F20", "F22", "F24"}


def fid_number(fid: str) -> int:
    return int(fid.lstrip("F"))


def all_cells() -> list[tuple[str, int]]:
    """Os 53 pares (fid, β) do catálogo, em ordem."""
    return [(fid, beta) for fid, betas in TABLE.items() for beta in betas]


def required_params(fid: str) -> tuple[str, ...]:
    if fid not in TABLE:
        raise EmptyCell(f"fatoração desconhecida: {fid}")
    return REQUIRED_PARAMS.get(fid, ("n",))


# ============================================================
# TIPOS
# ============================================================


class Embedding(str, Enum):
    DIRECT = "direct"
    BLOCK_DIAGONAL = "block-diagonal"
    REALIFIED = "realified"
    COMPLEXIFIED = "complexified"
    PERMUTED = "block-diagonal-then-permuted"
    MAPPED_PERMUTED = "structure-map-then-permuted"
    INVERSE_TRANSPOSE_PAIRED = "inverse-transpose-paired"


@dataclass(frozen=True)
class FactorSpec:
    groups: tuple[GroupId, ...]
    embedding: Embedding
    perm: PermKind | None = None
    perm_sizes: tuple[int, ...] = ()

    def label(self) -> str:
        names = " × ".join(g.label() for g in self.groups)
        if self.embedding is Embedding.REALIFIED:
            return f"realify({names})"
        if self.embedding is Embedding.COMPLEXIFIED:
            return f"complexify({names})"
        if self.embedding is Embedding.INVERSE_TRANSPOSE_PAIRED:
            return f"diag(G, G^-T), G ∈ {names}"
        if self.embedding is Embedding.PERMUTED:
            return f"{self.perm.value}ᵀ diag({names}) {self.perm.value}"
        if self.embedding is Embedding.MAPPED_PERMUTED:
            return f"{self.perm.value} map({names}) {self.perm.value}ᵀ"
        return names


@dataclass(frozen=True)
class FactorizationSpec:
    fid: str
    beta: int
    params: tuple[tuple[str, int], ...]
    ambient: GroupId
    k1: FactorSpec
    k2: FactorSpec
    template: MiddleTemplate
    angle_count: int
    angle_domain: AngleDomain
    sigma: InvolutionId
    tau: InvolutionId
    unit: str = "i"

    @property
    def cell_id(self) -> str:
        return f"{self.fid}/{FieldTag.from_beta(self.beta).value}"

    @property
    def field(self) -> FieldTag:
        return FieldTag.from_beta(self.beta)

    @property
    def size(self) -> int:
        return self.ambient.size

    @property
    def is_compact(self) -> bool:
        return self.angle_domain.is_compact

    @property
    def sign_symmetric(self) -> bool:
        """θ ↦ −θ é simetria do template (Ch/Sh e B^η, mas não Σ)."""
        return not self.is_compact and self.template not in (
            MiddleTemplate.SIGMA,
            MiddleTemplate.SIGMA_PAIR,
            MiddleTemplate.SIGMA_INVERSE_PAIR,
        )

    def param(self, name: str) -> int:
        return dict(self.params)[name]

    def params_dict(self) -> dict[str, int]:
        return dict(self.params)

    def params_label(self) -> str:
        keys = required_params(self.fid)
        return ",".join(f"{k}={self.param(k)}" for k in keys)


@dataclass(frozen=True, eq=False)
class FactoredElement:
    """(k₁, θ, k₂, g) com g = embed(k₁)·a(θ)·embed(k₂)."""

    spec: FactorizationSpec
    k1_raw: tuple[DenseMatrix, ...]
    theta: AngleVector
    k2_raw: tuple[DenseMatrix, ...]
    k1: DenseMatrix
    a: DenseMatrix
    k2: DenseMatrix
    g: DenseMatrix

    def reconstruction(self) -> DenseMatrix:
        return self.k1 @ self.a @ self.k2


# ============================================================
# CONSTRUÇÃO DAS CÉLULAS
# ============================================================


def _direct(*groups: GroupId) -> FactorSpec:
    return FactorSpec(groups, Embedding.DIRECT if len(groups) == 1 else Embedding.BLOCK_DIAGONAL)


def _realified(group: GroupId) -> FactorSpec:
    return FactorSpec((group,), Embedding.REALIFIED)


def _complexified(group: GroupId) -> FactorSpec:
    return FactorSpec((group,), Embedding.COMPLEXIFIED)


def _inv(formula: InvolutionFormula, *params: int, unit: str = "i", signs=()) -> InvolutionId:
    return InvolutionId(formula, tuple(params), unit, tuple(signs))


NEG_T = _inv(InvolutionFormula.NEG_TRANSPOSE)
NEG_DAG = _inv(InvolutionFormula.NEG_DAGGER)
ENTRY_CONJ = _inv(InvolutionFormula.ENTRY_CONJ)


def _ipq(p: int, q: int) -> InvolutionId:
    return _inv(InvolutionFormula.CONJ_BY_IPQ, p, q)


def _jn(n: int, bar: bool) -> InvolutionId:
    return _inv(InvolutionFormula.CONJ_BY_JN_BAR if bar else InvolutionFormula.CONJ_BY_JN, n)


def _eta_t(unit: str) -> InvolutionId:
    return _inv(InvolutionFormula.NEG_ETA_TRANSPOSE, unit=unit)


def _unit_conj(unit: str) -> InvolutionId:
    return _inv(InvolutionFormula.CONJ_BY_UNIT, unit=unit)


def _cell(fid, beta, par, ambient, k1, k2, template, count, domain, sigma, tau, unit="i") -> FactorizationSpec:
    return FactorizationSpec(
        fid=fid,
        beta=beta,
        params=tuple(sorted(par.items())),
        ambient=ambient,
        k1=k1,
        k2=k2,
        template=template,
        angle_count=count,
        angle_domain=domain,
        sigma=sigma,
        tau=tau,
        unit=unit,
    )


def _build(fid: str, beta: int, par: dict[str, int]) -> FactorizationSpec:
    f = FieldTag.from_beta(beta)
    n = par.get("n", 0)
    p, q = par.get("p", 0), par.get("q", 0)
    cell = partial(_cell, fid, beta, par)
    zp, zhp, real = AngleDomain.ZERO_PI, AngleDomain.ZERO_HALF_PI, AngleDomain.REAL_CANONICAL
    T = MiddleTemplate

    # --- compactos ---
    if fid == "F1":
        if f is C:
            k = _direct(unitary_group(n, R))
            return cell(unitary_group(n, C), k, k, T.TORUS, n, zp, NEG_T, NEG_T)
        k = _direct(unitary_group(n, C))
        return cell(unitary_group(n, H), k, k, T.TORUS, n, zp, _eta_t("i"), _eta_t("i"), unit="j")
    if fid == "F2":
        if f is R:
            k = _realified(unitary_group(n, C))
            return cell(unitary_group(2 * n, R), k, k, T.ROTATION_PAIR, n // 2, zhp, _jn(n, False), _jn(n, False))
        k = _complexified(unitary_group(n, H))
        return cell(unitary_group(2 * n, C), k, k, T.TORUS_PAIR, n, zhp, _jn(n, True), _jn(n, True))
    if fid == "F3":
        k1 = _direct(unitary_group(2 * n, R))
        k2 = _complexified(unitary_group(n, H))
        return cell(unitary_group(2 * n, C), k1, k2, T.TORUS_PAIR, n, zhp, NEG_T, _jn(n, True))
    if fid == "F4":
        r, s = par["r"], par["s"]
        k1 = _direct(unitary_group(p, f), unitary_group(q, f))
        k2 = _direct(unitary_group(r, f), unitary_group(s, f))
        return cell(unitary_group(n, f), k1, k2, T.CS, s, zhp, _ipq(p, q), _ipq(r, s))
    if fid == "F5":
        k2 = _direct(unitary_group(p, f), unitary_group(q, f))
        if f is C:
            k1 = _direct(unitary_group(n, R))
            return cell(unitary_group(n, C), k1, k2, T.CS_UNIT, q, zhp, NEG_T, _ipq(p, q))
        k1 = _direct(unitary_group(n, C))
        return cell(unitary_group(n, H), k1, k2, T.CS_UNIT, q, zhp, _eta_t("i"), _ipq(p, q), unit="j")
    if fid == "F6":
        sub = R if f is R else C
        k1 = _realified(unitary_group(n, C)) if f is R else _complexified(unitary_group(n, H))
        k2 = _direct(unitary_group(2 * p, sub), unitary_group(2 * q, sub))
        return cell(unitary_group(2 * n, f), k1, k2, T.CS_KRON, q, zhp, _jn(n, f is C), _ipq(2 * p, 2 * q))

    # --- GL ---
    if fid == "F7":
        k = _direct(unitary_group(n, f))
        return cell(gl_group(n, f), k, k, T.SIGMA, n, real, NEG_DAG, NEG_DAG)
    if fid == "F8":
        k1 = _direct(unitary_group(n, f))
        k2 = _direct(gl_group(p, f), gl_group(q, f))
        return cell(gl_group(n, f), k1, k2, T.HYPERBOLIC, q, real, NEG_DAG, _ipq(p, q))
    if fid == "F9":
        k1 = _direct(unitary_group(n, f))
        k2 = _direct(indefinite_group(p, q, f))
        tau = _inv(InvolutionFormula.NEG_IPQ_DAGGER, p, q)
        return cell(gl_group(n, f), k1, k2, T.SIGMA, n, real, NEG_DAG, tau)
    if fid == "F10":
        k1 = _direct(unitary_group(2 * n, f))
        k2 = _direct(symplectic_group(n, f))
        tau = _inv(InvolutionFormula.JN_TRANSPOSE, n)
        return cell(gl_group(2 * n, f), k1, k2, T.SIGMA_PAIR, n, real, NEG_DAG, tau)
    if fid == "F11":
        k1 = _direct(unitary_group(2 * n, f))
        k2 = _realified(gl_group(n, C)) if f is R else _complexified(gl_group(n, H))
        return cell(gl_group(2 * n, f), k1, k2, T.SIGMA_INVERSE_PAIR, n, real, NEG_DAG, _jn(n, f is C))
    if fid == "F12":
        k1 = _direct(unitary_group(n, f))
        if f is C:
            return cell(gl_group(n, C), k1, _direct(gl_group(n, R)), T.BOOST, n // 2, real, NEG_DAG, ENTRY_CONJ)
        k2 = _direct(gl_group(n, C))
        return cell(gl_group(n, H), k1, k2, T.BOOST, n // 2, real, NEG_DAG, _unit_conj("i"), unit="j")
    if fid == "F13":
        k1 = _direct(unitary_group(n, f))
        if f is C:
            return cell(gl_group(n, C), k1, _direct(orthogonal_group(n, C)), T.SIGMA, n, real, NEG_DAG, NEG_T)
        k2 = _direct(orthogonal_group(n, H, unit="j"))
        return cell(gl_group(n, H), k1, k2, T.SIGMA, n, real, NEG_DAG, _eta_t("j"))

    # --- simpléticos ---
    if fid == "F14":
        k = _realified(unitary_group(n, C)) if f is R else _complexified(unitary_group(n, H))
        return cell(symplectic_group(n, f), k, k, T.SIGMA_INVERSE_PAIR, n, real, NEG_DAG, NEG_DAG)
    if fid == "F15":
        k1 = _realified(unitary_group(n, C)) if f is R else _complexified(unitary_group(n, H))
        k2 = FactorSpec((gl_group(n, f),), Embedding.INVERSE_TRANSPOSE_PAIRED)
        return cell(symplectic_group(n, f), k1, k2, T.CH_SH, n, real, NEG_DAG, _ipq(n, n))
    if fid == "F16":
        k1 = _realified(unitary_group(n, C)) if f is R else _complexified(unitary_group(n, H))
        k2 = FactorSpec((symplectic_group(p, f), symplectic_group(q, f)), Embedding.PERMUTED, PermKind.PPQ, (p, q))
        tau = _inv(InvolutionFormula.CONJ_BY_SIGNS, signs=((p, 1), (q, -1), (p, 1), (q, -1)))
        return cell(symplectic_group(n, f), k1, k2, T.HYPERBOLIC_PAIR, q, real, NEG_DAG, tau)
    if fid == "F17":
        k1 = _complexified(unitary_group(n, H))
        k2 = _direct(symplectic_group(n, R))
        return cell(symplectic_group(n, C), k1, k2, T.CH_SH_UNIT, n, real, NEG_DAG, ENTRY_CONJ)

    # --- indefinidos ---
    if fid == "F18":
        k = _direct(unitary_group(p, f), unitary_group(q, f))
        return cell(indefinite_group(p, q, f), k, k, T.HYPERBOLIC, q, real, _ipq(p, q), _ipq(p, q))
    if fid == "F19":
        p1, q1, p2, q2 = par["p1"], par["q1"], par["p2"], par["q2"]
        k1 = _direct(unitary_group(p, f), unitary_group(q, f))
        k2 = FactorSpec(
            (indefinite_group(p1, q1, f), indefinite_group(p2, q2, f)),
            Embedding.PERMUTED,
            PermKind.P1,
            (p1, q1, p2, q2),
        )
        tau = _inv(InvolutionFormula.CONJ_BY_SIGNS, signs=((p1, 1), (p2, -1), (q1, 1), (q2, -1)))
        count = min(p1, q2) + min(p2, q1)
        return cell(indefinite_group(p, q, f), k1, k2, T.HYPERBOLIC_PERMUTED, count, real, _ipq(p, q), tau)
    if fid == "F20":
        k1 = _direct(unitary_group(2 * p, f), unitary_group(2 * q, f))
        inner = indefinite_group(p, q, C if f is R else H)
        k2 = FactorSpec((inner,), Embedding.MAPPED_PERMUTED, PermKind.PPQ, (p, q))
        formula = InvolutionFormula.CONJ_BY_JPJQ if f is R else InvolutionFormula.CONJ_BY_JPJQ_BAR
        tau = _inv(formula, p, q)
        return cell(indefinite_group(2 * p, 2 * q, f), k1, k2, T.HYPERBOLIC_DOUBLED, q, real, _ipq(2 * p, 2 * q), tau)
    if fid == "F21":
        k1 = _direct(unitary_group(n, f), unitary_group(n, f))
        k2 = _realified(orthogonal_group(n, C)) if f is R else _complexified(orthogonal_group(n, H, unit="i"))
        return cell(indefinite_group(n, n, f), k1, k2, T.CH_SH, n, real, _ipq(n, n), _jn(n, f is C))
    if fid == "F22":
        k1 = _direct(unitary_group(p, f), unitary_group(q, f))
        if f is C:
            k2 = _direct(indefinite_group(p, q, R))
            return cell(indefinite_group(p, q, C), k1, k2, T.HYPERBOLIC_UNIT, q, real, _ipq(p, q), ENTRY_CONJ)
        k2 = _direct(indefinite_group(p, q, C))
        return cell(indefinite_group(p, q, H), k1, k2, T.HYPERBOLIC_UNIT, q, real, _ipq(p, q), _unit_conj("i"), unit="j")

    # --- ortogonais complexos / quaterniônicos ---
    if fid == "F23":
        if f is C:
            k = _direct(unitary_group(n, R))
            return cell(orthogonal_group(n, C), k, k, T.BOOST, n // 2, real, ENTRY_CONJ, ENTRY_CONJ)
        k = _direct(unitary_group(n, C))
        amb = orthogonal_group(n, H, unit="i")
        return cell(amb, k, k, T.BOOST, n // 2, real, _unit_conj("i"), _unit_conj("i"), unit="j")
    if fid == "F24":
        if f is C:
            k1 = _direct(unitary_group(n, R))
            k2 = _direct(orthogonal_group(p, C), orthogonal_group(q, C))
            return cell(orthogonal_group(n, C), k1, k2, T.HYPERBOLIC_UNIT, q, real, ENTRY_CONJ, _ipq(p, q))
        k1 = _direct(unitary_group(n, C))
        k2 = _direct(orthogonal_group(p, H, unit="i"), orthogonal_group(q, H, unit="i"))
        amb = orthogonal_group(n, H, unit="i")
        return cell(amb, k1, k2, T.HYPERBOLIC_UNIT, q, real, _unit_conj("i"), _ipq(p, q), unit="j")
    if fid == "F25":
        k1 = _direct(unitary_group(2 * n, R))
        k2 = _complexified(orthogonal_group(n, H, unit="j"))
        return cell(orthogonal_group(2 * n, C), k1, k2, T.CH_SH_UNIT, n, real, ENTRY_CONJ, _jn(n, True))
    raise EmptyCell(f"fatoração desconhecida: {fid}")


def _normalize_params(fid: str, params: dict) -> dict[str, int]:
    required = required_params(fid)
    known = set(required) | {"n", "p", "q"}
    par: dict[str, int] = {}
    for key, value in params.items():
        if value is None:
            continue
        if key not in known:
            raise InvalidParameter(f"{fid} não usa o parâmetro '{key}'")
        par[key] = int(value)
    missing = [k for k in required if k not in par]
    if missing:
        raise BadPartition(f"{fid} exige {', '.join(required)}; faltando {', '.join(missing)}")
    if any(v < 0 for v in par.values()):
        raise BadPartition(f"{fid}: parâmetros negativos {par}")

    if fid == "F19":
        derived = {"p": par["p1"] + par["p2"], "q": par["q1"] + par["q2"]}
        derived["n"] = derived["p"] + derived["q"]
    elif "p" in required:
        derived = {"n": par["p"] + par["q"]}
    else:
        derived = {}
    for key, value in derived.items():
        if key in par and par[key] != value:
            raise BadPartition(f"{fid}: {key}={par[key]} incompatível com a partição ({key}={value})")
        par[key] = value
    return par


def _check_partition(fid: str, par: dict[str, int]) -> None:
    if par["n"] < 1:
        raise BadPartition(f"{fid}: dimensão precisa ser ≥ 1")
    if fid in _P_GE_Q and par["p"] < par["q"]:
        raise BadPartition(f"{fid} exige p ≥ q, recebeu p={par['p']}, q={par['q']}")
    if fid == "F4":
        p, q, r, s = par["p"], par["q"], par["r"], par["s"]
        if r + s != p + q:
            raise BadPartition(f"F4 exige p+q = r+s, recebeu {p}+{q} ≠ {r}+{s}")
        if not r >= p >= q >= s:
            raise BadPartition(f"F4 exige r ≥ p ≥ q ≥ s, recebeu r={r}, p={p}, q={q}, s={s}")


def spec(fid: str, beta: int, params: dict | None = None, **kwargs) -> FactorizationSpec:
    """
    Monta a linha (fid, β) do catálogo.

    Args:
        fid: "F1" .. "F25"
        beta: 1, 2 ou 4
        params: n e/ou partição (p, q), (p, q, r, s) ou (p1, q1, p2, q2);
            também aceitos como argumentos nomeados

    Raises:
        EmptyCell: célula vazia na tabela
        BadPartition: partição fora das condições do teorema
    """
    fid = fid.upper()
    if fid not in TABLE or beta not in TABLE[fid]:
        raise EmptyCell(f"célula vazia: {fid} com β={beta}")
    par = _normalize_params(fid, {**(params or {}), **kwargs})
    _check_partition(fid, par)
    return _build(fid, beta, par)


# ============================================================
# PARTIÇÕES PARA VARREDURA
# ============================================================


def _pq_splits(m: int) -> list[tuple[int, int]]:
    """Partições p ≥ q de m: a mais equilibrada e (m−1, 1)."""
    if m < 1:
        return []
    splits = [((m + 1) // 2, m // 2)]
    if m >= 3:
        splits.append((m - 1, 1))
    return list(dict.fromkeys(splits))


def params_for_size(fid: str, beta: int, size: int) -> list[dict[str, int]]:
    """
    Parâmetros da varredura para um tamanho de matriz.

    Cobre p = q, p > q e os casos degenerados (s = 0 no CSD, partes vazias
    no F19). Famílias de dimensão 2n pulam tamanhos ímpares.
    """
    if fid not in TABLE or beta not in TABLE[fid]:
        raise EmptyCell(f"célula vazia: {fid} com β={beta}")
    if fid in DOUBLED:
        if size % 2:
            return []
        size //= 2
    if size < 1:
        return []
    required = required_params(fid)
    if required == ("n",):
        return [{"n": size}]
    if fid == "F4":
        out = []
        for p, q in _pq_splits(size):
            out.append({"p": p, "q": q, "r": p, "s": q})
            if q >= 2:
                out.append({"p": p, "q": q, "r": size - q + 1, "s": q - 1})
            out.append({"p": p, "q": q, "r": size, "s": 0})
        return [dict(t) for t in dict.fromkeys(tuple(sorted(d.items())) for d in out)]
    if fid == "F19":
        p, q = (size + 1) // 2, size // 2
        balanced = {"p1": (p + 1) // 2, "q1": q // 2, "p2": p // 2, "q2": q - q // 2}
        lopsided = {"p1": p, "q1": 0, "p2": 0, "q2": q}
        return [balanced] if balanced == lopsided else [balanced, lopsided]
    return [{"p": p, "q": q} for p, q in _pq_splits(size)]


# ============================================================
# MERGULHO, COMPOSIÇÃO E AMOSTRAGEM
# ============================================================


def _factor(spec_: FactorizationSpec, side: int) -> FactorSpec:
    if side not in (1, 2):
        raise InvalidParameter(f"lado deve ser 1 ou 2, recebeu {side}")
    return spec_.k1 if side == 1 else spec_.k2


def _apply_embedding(fs: FactorSpec, raw: tuple[DenseMatrix, ...]) -> DenseMatrix:
    emb = fs.embedding
    if emb is Embedding.DIRECT:
        return raw[0]
    if emb is Embedding.BLOCK_DIAGONAL:
        return block_diag(*raw)
    if emb is Embedding.REALIFIED:
        return realify(raw[0])
    if emb is Embedding.COMPLEXIFIED:
        return complexify(raw[0])
    if emb is Embedding.INVERSE_TRANSPOSE_PAIRED:
        g = raw[0]
        return block_diag(g, inverse(conj_transpose(g, TransposeKind.T)))
    perm = block_permutation(fs.perm, *fs.perm_sizes)
    perm_t = conj_transpose(perm, TransposeKind.T)
    if emb is Embedding.PERMUTED:
        return perm_t @ block_diag(*raw) @ perm
    mapped = realify(raw[0]) if raw[0].field is C else complexify(raw[0])
    return perm @ mapped @ perm_t


def embed_factor(
    spec_: FactorizationSpec,
    side: int,
    raw,
    check: bool = True,
    tol: float = MEMBERSHIP_TOL,
) -> DenseMatrix:
    """
    Leva os fatores brutos de um lado para a matriz do grupo ambiente.

    Raises:
        SizeMismatch: número de fatores diferente do esperado
        MembershipFailure: fator bruto fora do seu grupo (check=True)
    """
    fs = _factor(spec_, side)
    raw = (raw,) if isinstance(raw, DenseMatrix) else tuple(raw)
    if len(raw) != len(fs.groups):
        raise SizeMismatch(f"{spec_.cell_id} lado {side}: esperados {len(fs.groups)} fatores, recebidos {len(raw)}")
    aligned = []
    for group, m in zip(fs.groups, raw):
        if check:
            residual = membership_residual(group, m)
            if residual > tol * max(1, group.size):
                raise MembershipFailure(f"{spec_.cell_id} lado {side}: fator fora de {group.label()} (resíduo {residual:.3e})")
        aligned.append(m.promote(group.matrix_field) if m.field.beta < group.matrix_field.beta else m)
    return _apply_embedding(fs, tuple(aligned)).promote(spec_.ambient.matrix_field)


def _as_tuple(raw) -> tuple[DenseMatrix, ...]:
    return (raw,) if isinstance(raw, DenseMatrix) else tuple(raw)


def compose(spec_: FactorizationSpec, k1_raw, theta, k2_raw) -> FactoredElement:
    """g = embed(k₁)·a(θ)·embed(k₂), validando fatores e ângulos."""
    if not isinstance(theta, AngleVector):
        theta = AngleVector(theta, spec_.angle_domain)
    a = middle_factor(spec_, theta)
    k1 = embed_factor(spec_, 1, k1_raw)
    k2 = embed_factor(spec_, 2, k2_raw)
    g = k1 @ a @ k2
    logger.debug(f"{spec_.cell_id}: composto g {g.rows}x{g.cols}, ‖g‖={g.norm():.3e}")
    return FactoredElement(spec_, _as_tuple(k1_raw), theta, _as_tuple(k2_raw), k1, a, k2, g)


def assemble(spec_: FactorizationSpec, k1_raw, theta, k2_raw, g: DenseMatrix) -> FactoredElement:
    """Monta o elemento a partir da saída de uma decomposição, sem validar."""
    if not isinstance(theta, AngleVector):
        theta = AngleVector(theta, spec_.angle_domain)
    k1 = embed_factor(spec_, 1, k1_raw, check=False)
    k2 = embed_factor(spec_, 2, k2_raw, check=False)
    a = build_middle(spec_, theta)
    return FactoredElement(spec_, _as_tuple(k1_raw), theta, _as_tuple(k2_raw), k1, a, k2, g)


def sample_angles(spec_: FactorizationSpec, rng: np.random.Generator) -> AngleVector:
    upper = spec_.angle_domain.upper if spec_.is_compact else HYPERBOLIC_SAMPLE_MAX
    return AngleVector(rng.uniform(0.0, upper, size=spec_.angle_count), spec_.angle_domain)


def sample_factored(spec_: FactorizationSpec, rng: np.random.Generator, scale: float = DEFAULT_SCALE) -> FactoredElement:
    """Amostra fatores via sample_group e θ uniforme no domínio, e compõe."""
    k1_raw = tuple(sample_group(g, rng, scale) for g in spec_.k1.groups)
    theta = sample_angles(spec_, rng)
    k2_raw = tuple(sample_group(g, rng, scale) for g in spec_.k2.groups)
    return compose(spec_, k1_raw, theta, k2_raw)


def identity_element(spec_: FactorizationSpec) -> FactoredElement:
    """Elemento com todos os fatores iguais à identidade e θ = 0."""
    k1 = tuple(identity(g.size, g.matrix_field) for g in spec_.k1.groups)
    k2 = tuple(identity(g.size, g.matrix_field) for g in spec_.k2.groups)
    return compose(spec_, k1, np.zeros(spec_.angle_count), k2)


# ============================================================
# CONSISTÊNCIA DO CATÁLOGO
# ============================================================


def middle_generators(spec_: FactorizationSpec) -> list[DenseMatrix]:
    """
    Geradores X_l do subgrupo A, um por ângulo.

    Parte ímpar de a(θ) na direção e_l: (a(t·e_l) − a(−t·e_l)) / (2·f(t)),
    com f = sin nos templates compactos e sinh nos demais.
    """
    t = GENERATOR_STEP
    denom = 2.0 * (np.sin(t) if spec_.is_compact else np.sinh(t))
    gens = []
    for l in range(spec_.angle_count):
        e = np.zeros(spec_.angle_count)
        e[l] = t
        gens.append((build_middle(spec_, e) - build_middle(spec_, -e)) / denom)
    return gens


@dataclass
class ConsistencyReport:
    cell: str
    involution_residual: float
    automorphism_residual: float
    generator_residual: float
    commutation_residual: float
    passed: bool


def consistency_check(
    spec_: FactorizationSpec,
    rng: np.random.Generator,
    trials: int = 3,
    scale: float = DEFAULT_SCALE,
) -> ConsistencyReport:
    """
    Confere as escolhas do catálogo em dados amostrados.

    (a) σ e τ são involuções e automorfismos da álgebra;
    (b) ambas negam cada gerador do fator do meio;
    (c) os geradores comutam entre si.
    """
    inv_res = auto_res = 0.0
    for _ in range(trials):
        x = sample_algebra(spec_.ambient, rng, scale)
        y = sample_algebra(spec_.ambient, rng, scale)
        xy = commutator(x, y)
        for inv in (spec_.sigma, spec_.tau):
            tx, ty = involution(inv, x), involution(inv, y)
            inv_res = max(inv_res, (involution(inv, tx) - x).norm() / max(1.0, x.norm()))
            auto = (involution(inv, xy) - commutator(tx, ty)).norm()
            auto_res = max(auto_res, auto / max(1.0, x.norm() * y.norm()))

    gens = middle_generators(spec_)
    gen_res = 0.0
    for gen in gens:
        for inv in (spec_.sigma, spec_.tau):
            gen_res = max(gen_res, (involution(inv, gen) + gen).norm())
    comm_res = 0.0
    for i, gi in enumerate(gens):
        for gj in gens[i + 1 :]:
            comm_res = max(comm_res, commutator(gi, gj).norm())

    passed = (
        inv_res <= INVOLUTION_TOL
        and auto_res <= INVOLUTION_TOL
        and gen_res <= GENERATOR_TOL
        and comm_res <= GENERATOR_TOL
    )
    if not passed:
        logger.warning(
            f"{spec_.cell_id}: consistência falhou "
            f"(inv={inv_res:.2e}, auto={auto_res:.2e}, ger={gen_res:.2e}, comut={comm_res:.2e})"
        )
    return ConsistencyReport(spec_.cell_id, inv_res, auto_res, gen_res, comm_res, passed)
