"""
Núcleo numérico — matrizes densas sobre ℝ, ℂ e ℍ.

Armazenamento:
    R → ndarray float (m, n)
    C → ndarray complex (m, n)
    H → ndarray float (m, n, 4), componentes (w, x, y, z)

Contém as seis transpostas (T, H, D, D_i, D_j, D_k), os mapas de
estrutura realify/complexify com seus inversos e a exponencial de
matriz (quaterniões via complexify).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from numbers import Complex, Real

import numpy as np
from scipy import linalg

from app.config import EXP_STRUCTURE_FACTOR, MACHINE_EPS
from app.errors import InvalidParameter, InvalidTranspose, ShapeMismatch, Singular, WrongField

logger = logging.getLogger(__name__)

# ============================================================
# CORPOS E ESCALARES
# ============================================================


class FieldTag(str, Enum):
    """Corpo dos escalares: R (β=1), C (β=2), H (β=4)."""

    R = "R"
    C = "C"
    H = "H"

    @property
    def beta(self) -> int:
        return {"R": 1, "C": 2, "H": 4}[self.value]

    @classmethod
    def from_beta(cls, beta: int) -> "FieldTag":
        mapping = {1: cls.R, 2: cls.C, 4: cls.H}
        if beta not in mapping:
            raise WrongField(f"β inválido: {beta} (use 1, 2 ou 4)")
        return mapping[beta]


def hamilton(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Produto de Hamilton componente a componente (último eixo = w, x, y, z)."""
    aw, ax, ay, az = np.moveaxis(np.asarray(a, dtype=float), -1, 0)
    bw, bx, by, bz = np.moveaxis(np.asarray(b, dtype=float), -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def unit(cls, name: str) -> "Quaternion":
        """Unidade "1", "i", "j" ou "k"."""
        if name not in _UNIT_ARRAYS:
            raise InvalidParameter(f"unidade quaterniônica desconhecida: {name!r}")
        return cls.from_array(_UNIT_ARRAYS[name])

    @classmethod
    def from_array(cls, values) -> "Quaternion":
        w, x, y, z = (float(v) for v in values)
        return cls(w, x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.w**2 + self.x**2 + self.y**2 + self.z**2

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion.from_array(hamilton(self.as_array(), other.as_array()))
        if isinstance(other, Real):
            return Quaternion.from_array(self.as_array() * float(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Real):
            return self * other
        return NotImplemented

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.as_array() + other.as_array())

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.as_array() - other.as_array())

    def __neg__(self) -> "Quaternion":
        return Quaternion.from_array(-self.as_array())


_UNIT_ARRAYS = {
    "1": np.array([1.0, 0.0, 0.0, 0.0]),
    "i": np.array([0.0, 1.0, 0.0, 0.0]),
    "j": np.array([0.0, 0.0, 1.0, 0.0]),
    "k": np.array([0.0, 0.0, 0.0, 1.0]),
}

_QUATERNION_CONJ = np.array([1.0, -1.0, -1.0, -1.0])


# ============================================================
# MATRIZ DENSA
# ============================================================


def _quaternion_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = (a[..., c] for c in range(4))
    bw, bx, by, bz = (b[..., c] for c in range(4))
    return np.stack(
        [
            aw @ bw - ax @ bx - ay @ by - az @ bz,
            aw @ bx + ax @ bw + ay @ bz - az @ by,
            aw @ by - ax @ bz + ay @ bw + az @ bx,
            aw @ bz + ax @ by - ay @ bx + az @ bw,
        ],
        axis=-1,
    )


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    """Matriz m×n com corpo explícito."""

    field: FieldTag
    data: np.ndarray

    def __post_init__(self):
        field = FieldTag(self.field)
        data = np.asarray(self.data)
        if field is FieldTag.H:
            data = np.array(data, dtype=float)
            if data.ndim != 3 or data.shape[2] != 4:
                raise ShapeMismatch(f"matriz quaterniônica precisa de forma (m, n, 4), recebido {data.shape}")
        elif field is FieldTag.C:
            data = np.array(data, dtype=complex)
            if data.ndim != 2:
                raise ShapeMismatch(f"matriz complexa precisa ser 2D, recebido {data.shape}")
        else:
            if np.iscomplexobj(data):
                raise WrongField("dados complexos marcados como reais")
            data = np.array(data, dtype=float)
            if data.ndim != 2:
                raise ShapeMismatch(f"matriz real precisa ser 2D, recebido {data.shape}")
        data.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_array(cls, values) -> "DenseMatrix":
        """Infere o corpo: dtype complexo → C, 3D com eixo 4 → H, senão R."""
        arr = np.asarray(values)
        if np.iscomplexobj(arr):
            return cls(FieldTag.C, arr)
        if arr.ndim == 3:
            return cls(FieldTag.H, arr)
        return cls(FieldTag.R, arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def promote(self, field: FieldTag) -> "DenseMatrix":
        """Mergulha a matriz num corpo maior (R ⊂ C ⊂ H, a + bi ↦ (a, b, 0, 0))."""
        field = FieldTag(field)
        if field is self.field:
            return self
        if field.beta < self.field.beta:
            raise WrongField(f"não é possível rebaixar {self.field.value} para {field.value}")
        if field is FieldTag.C:
            return DenseMatrix(FieldTag.C, self.data.astype(complex))
        out = np.zeros(self.shape + (4,))
        out[..., 0] = self.data.real
        if self.field is FieldTag.C:
            out[..., 1] = self.data.imag
        return DenseMatrix(FieldTag.H, out)

    def norm(self) -> float:
        """Norma de Frobenius (sobre as 4 componentes no caso quaterniônico)."""
        return float(np.linalg.norm(self.data.ravel()))

    def entries(self) -> list:
        """Entradas em ordem row-major: float, complex ou Quaternion."""
        if self.field is FieldTag.H:
            return [Quaternion.from_array(v) for v in self.data.reshape(-1, 4)]
        if self.field is FieldTag.C:
            return [complex(v) for v in self.data.ravel()]
        return [float(v) for v in self.data.ravel()]

    def _aligned(self, other: "DenseMatrix") -> tuple["DenseMatrix", "DenseMatrix", FieldTag]:
        field = common_field(self, other)
        return self.promote(field), other.promote(field), field

    def __matmul__(self, other: "DenseMatrix") -> "DenseMatrix":
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeMismatch(f"produto {self.shape} @ {other.shape}")
        a, b, field = self._aligned(other)
        if field is FieldTag.H:
            return DenseMatrix(field, _quaternion_matmul(a.data, b.data))
        return DenseMatrix(field, a.data @ b.data)

    def __add__(self, other: "DenseMatrix") -> "DenseMatrix":
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ShapeMismatch(f"soma {self.shape} + {other.shape}")
        a, b, field = self._aligned(other)
        return DenseMatrix(field, a.data + b.data)

    def __sub__(self, other: "DenseMatrix") -> "DenseMatrix":
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> "DenseMatrix":
        return DenseMatrix(self.field, -self.data)

    def __mul__(self, scalar) -> "DenseMatrix":
        if isinstance(scalar, Real):
            return DenseMatrix(self.field, self.data * float(scalar))
        if isinstance(scalar, Complex) and self.field is not FieldTag.H:
            return DenseMatrix(FieldTag.C, self.data * complex(scalar))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "DenseMatrix":
        return self * (1.0 / float(scalar))

    def __repr__(self) -> str:
        return f"DenseMatrix({self.field.value}, {self.rows}x{self.cols})"


def common_field(*mats: DenseMatrix) -> FieldTag:
    return max((m.field for m in mats), key=lambda f: f.beta, default=FieldTag.R)


def _zeros_array(m: int, n: int, field: FieldTag) -> np.ndarray:
    if field is FieldTag.H:
        return np.zeros((m, n, 4))
    return np.zeros((m, n), dtype=complex if field is FieldTag.C else float)


def zeros(m: int, n: int, field: FieldTag = FieldTag.R) -> DenseMatrix:
    return DenseMatrix(field, _zeros_array(m, n, FieldTag(field)))


def identity(n: int, field: FieldTag = FieldTag.R) -> DenseMatrix:
    return DenseMatrix(FieldTag.R, np.eye(n)).promote(field)


def diagonal(values) -> DenseMatrix:
    """Matriz diagonal real ou complexa a partir de um vetor."""
    return DenseMatrix.from_array(np.diag(np.asarray(values)))


def block_diag(*mats: DenseMatrix) -> DenseMatrix:
    """Soma direta; blocos de tamanho zero são aceitos."""
    field = common_field(*mats)
    blocks = [m.promote(field) for m in mats]
    out = _zeros_array(sum(b.rows for b in blocks), sum(b.cols for b in blocks), field)
    r = c = 0
    for b in blocks:
        out[r : r + b.rows, c : c + b.cols] = b.data
        r += b.rows
        c += b.cols
    return DenseMatrix(field, out)


def block_matrix(rows: list[list[DenseMatrix]]) -> DenseMatrix:
    """Monta uma matriz em blocos [[A, B], [C, D]]."""
    field = common_field(*(b for row in rows for b in row))
    stripes = [np.concatenate([b.promote(field).data for b in row], axis=1) for row in rows]
    return DenseMatrix(field, np.concatenate(stripes, axis=0))


def signature_matrix(p: int, q: int) -> DenseMatrix:
    """I_{p,q} = diag(I_p, −I_q)."""
    return diagonal(np.concatenate([np.ones(p), -np.ones(q)]))


def symplectic_form(n: int) -> DenseMatrix:
    """J_n = [[0, I_n], [−I_n, 0]] (tamanho 2n)."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return DenseMatrix(FieldTag.R, np.block([[zero, eye], [-eye, zero]]))


def exchange_matrix(n: int) -> DenseMatrix:
    """E_n: identidade reversa."""
    return DenseMatrix(FieldTag.R, np.fliplr(np.eye(n)))


def from_unit_parts(real: np.ndarray, coeff: np.ndarray, unit: str) -> DenseMatrix:
    """Matriz real + η·coeff, com η ∈ {i, j, k}; η = i produz matriz complexa."""
    real = np.asarray(real, dtype=float)
    coeff = np.asarray(coeff, dtype=float)
    if unit == "i":
        return DenseMatrix(FieldTag.C, real + 1j * coeff)
    if unit not in ("j", "k"):
        raise InvalidParameter(f"unidade imaginária inválida: {unit!r}")
    out = np.zeros(real.shape + (4,))
    out[..., 0] = real
    out[..., 2 if unit == "j" else 3] = coeff
    return DenseMatrix(FieldTag.H, out)


def scalar_matrix(value: Quaternion, n: int) -> DenseMatrix:
    """value·I_n sobre ℍ."""
    out = np.zeros((n, n, 4))
    idx = np.arange(n)
    out[idx, idx] = value.as_array()
    return DenseMatrix(FieldTag.H, out)


def commutator(x: DenseMatrix, y: DenseMatrix) -> DenseMatrix:
    return x @ y - y @ x


# ============================================================
# TRANSPOSTAS
# ============================================================


class TransposeKind(str, Enum):
    T = "T"
    H = "H"
    D = "D"
    D_I = "D_i"
    D_J = "D_j"
    D_K = "D_k"

    @property
    def unit(self) -> str | None:
        """η das transpostas D_η; None para as demais."""
        return self.value[-1] if self.value.startswith("D_") else None

    @classmethod
    def eta(cls, unit: str) -> "TransposeKind":
        return cls(f"D_{unit}")


_TRANSPOSE_FIELDS = {
    TransposeKind.T: {FieldTag.R, FieldTag.C, FieldTag.H},
    TransposeKind.H: {FieldTag.C},
    TransposeKind.D: {FieldTag.H},
    TransposeKind.D_I: {FieldTag.H},
    TransposeKind.D_J: {FieldTag.H},
    TransposeKind.D_K: {FieldTag.H},
}


def conj_transpose(m: DenseMatrix, kind: TransposeKind) -> DenseMatrix:
    """
    Aplica uma das seis transpostas.

    D_η conjuga só a componente η de cada entrada: entrada q ↦ −η·q̄·η,
    seguida da transposição. Ex.: D_j(2 + 3j) = 2 − 3j, D_j(i) = i.
    """
    kind = TransposeKind(kind)
    if m.field not in _TRANSPOSE_FIELDS[kind]:
        raise InvalidTranspose(f"transposta {kind.value} não definida sobre {m.field.value}")
    if kind is TransposeKind.T:
        return DenseMatrix(m.field, np.swapaxes(m.data, 0, 1))
    if kind is TransposeKind.H:
        return DenseMatrix(m.field, m.data.conj().T)
    qbar = m.data * _QUATERNION_CONJ
    if kind is not TransposeKind.D:
        eta = _UNIT_ARRAYS[kind.unit]
        qbar = hamilton(hamilton(-eta, qbar), eta)
    return DenseMatrix(m.field, np.swapaxes(qbar, 0, 1))


def dagger_kind(field: FieldTag) -> TransposeKind:
    """Transposta conjugada natural do corpo: T, H ou D."""
    return {FieldTag.R: TransposeKind.T, FieldTag.C: TransposeKind.H, FieldTag.H: TransposeKind.D}[field]


def dagger(m: DenseMatrix) -> DenseMatrix:
    return conj_transpose(m, dagger_kind(m.field))


def entry_conjugate(m: DenseMatrix) -> DenseMatrix:
    """Conjugação entrada a entrada (sem transpor); só ℝ e ℂ."""
    if m.field is FieldTag.H:
        raise WrongField("conjugação entrada a entrada só é usada sobre ℝ e ℂ")
    return DenseMatrix(m.field, m.data.conj())


def unit_conjugate(m: DenseMatrix, unit: str) -> DenseMatrix:
    """X ↦ −η·X·η entrada a entrada (resultado sobre ℍ)."""
    eta = _UNIT_ARRAYS[unit]
    q = m.promote(FieldTag.H).data
    return DenseMatrix(FieldTag.H, hamilton(hamilton(-eta, q), eta))


# ============================================================
# MAPAS DE ESTRUTURA
# ============================================================


def realify(m: DenseMatrix) -> DenseMatrix:
    """ℂ^{m×n} → ℝ^{2m×2n}: A + iB ↦ [[A, B], [−B, A]]."""
    if m.field is not FieldTag.C:
        raise WrongField(f"realify espera matriz complexa, recebeu {m.field.value}")
    re, im = m.data.real, m.data.imag
    return DenseMatrix(FieldTag.R, np.block([[re, im], [-im, re]]))


def derealify(m: DenseMatrix) -> DenseMatrix:
    """Inverso de realify (lê os blocos superiores)."""
    if m.field is not FieldTag.R or m.rows % 2 or m.cols % 2:
        raise ShapeMismatch(f"derealify espera matriz real de dimensões pares, recebeu {m!r}")
    r, c = m.rows // 2, m.cols // 2
    return DenseMatrix(FieldTag.C, m.data[:r, :c] + 1j * m.data[:r, c:])


def complexify(m: DenseMatrix) -> DenseMatrix:
    """ℍ^{m×n} → ℂ^{2m×2n}: A + Bj ↦ [[A, B], [−B̄, Ā]] com A = w + ix, B = y + iz."""
    if m.field is not FieldTag.H:
        raise WrongField(f"complexify espera matriz quaterniônica, recebeu {m.field.value}")
    w, x, y, z = (m.data[..., c] for c in range(4))
    a = w + 1j * x
    b = y + 1j * z
    return DenseMatrix(FieldTag.C, np.block([[a, b], [-b.conj(), a.conj()]]))


def decomplexify(m: DenseMatrix) -> DenseMatrix:
    """Inverso de complexify (lê os blocos superiores)."""
    if m.field is FieldTag.H or m.rows % 2 or m.cols % 2:
        raise ShapeMismatch(f"decomplexify espera matriz complexa de dimensões pares, recebeu {m!r}")
    data = m.promote(FieldTag.C).data
    r, c = m.rows // 2, m.cols // 2
    a, b = data[:r, :c], data[:r, c:]
    return DenseMatrix(FieldTag.H, np.stack([a.real, a.imag, b.real, b.imag], axis=-1))


def complexified_structure_residual(m: DenseMatrix) -> float:
    """‖−J·conj(M)·J − M‖: zero exatamente na imagem de complexify."""
    n = m.rows // 2
    j = symplectic_form(n).data
    data = m.promote(FieldTag.C).data
    return float(np.linalg.norm(-j @ data.conj() @ j - data))


# ============================================================
# INVERSA, VALORES SINGULARES E EXPONENCIAL
# ============================================================


def inverse(m: DenseMatrix) -> DenseMatrix:
    if not m.is_square:
        raise ShapeMismatch(f"inversa de matriz não quadrada {m.shape}")
    if m.field is FieldTag.H:
        return decomplexify(inverse(complexify(m)))
    try:
        return DenseMatrix(m.field, np.linalg.inv(m.data))
    except np.linalg.LinAlgError as e:
        raise Singular(f"matriz singular: {e}") from e


def singular_values(m: DenseMatrix) -> np.ndarray:
    """Valores singulares decrescentes; sobre ℍ cada valor aparece uma vez."""
    if m.field is FieldTag.H:
        return np.linalg.svd(complexify(m).data, compute_uv=False)[::2]
    return np.linalg.svd(m.data, compute_uv=False)


def exp_matrix(x: DenseMatrix) -> DenseMatrix:
    """
    Exponencial de matriz.

    ℝ e ℂ usam scipy.linalg.expm diretamente; ℍ passa por complexify,
    confere se o resultado continua na imagem do mapa e volta.
    """
    if not x.is_square:
        raise ShapeMismatch(f"exponencial de matriz não quadrada {x.shape}")
    if x.rows == 0:
        return x
    if x.field is not FieldTag.H:
        return DenseMatrix(x.field, linalg.expm(x.data))

    e = DenseMatrix(FieldTag.C, linalg.expm(complexify(x).data))
    residual = complexified_structure_residual(e)
    bound = EXP_STRUCTURE_FACTOR * MACHINE_EPS * max(1.0, e.norm())
    if residual > bound:
        logger.warning(f"exp quaterniônica fora da estrutura: resíduo {residual:.3e} > {bound:.3e}")
    return decomplexify(e)
