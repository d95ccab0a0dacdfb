"""
Exceções do domínio.

Todas herdam de FactorizationError, que por sua vez é um ValueError:
quem chama pode capturar a família inteira ou um caso específico.
"""


class FactorizationError(ValueError):
    """Erro base das fatorações."""


# ============================================================
# ARITMÉTICA E FORMATOS
# ============================================================


class InvalidTranspose(FactorizationError):
    """Transposta não definida para o corpo da matriz (ex.: D sobre ℝ)."""


class WrongField(FactorizationError):
    """Corpo da matriz incompatível com a operação."""


class ShapeMismatch(FactorizationError):
    """Dimensões incompatíveis."""


class SizeMismatch(FactorizationError):
    """Quantidade de ângulos ou de blocos diferente da esperada."""


class DomainViolation(FactorizationError):
    """Ângulo fora do domínio do template."""


class InvalidParameter(FactorizationError):
    pass


# ============================================================
# CATÁLOGO E GRUPOS
# ============================================================


class UnknownInvolution(FactorizationError):
    pass


class EmptyCell(FactorizationError):
    """Par (fatoração, β) que não existe no catálogo."""


class BadPartition(FactorizationError):
    """Partição (p, q, ...) que viola as condições do teorema."""


class MembershipFailure(FactorizationError):
    """Fator bruto não pertence ao grupo declarado."""


class NotInGroup(FactorizationError):
    """Entrada de uma decomposição fora do grupo ambiente."""


# ============================================================
# DECOMPOSIÇÕES
# ============================================================


class Singular(FactorizationError):
    """Matriz (numericamente) singular."""


class SignatureMismatch(FactorizationError):
    """Contagem de autovalores positivos/negativos difere de (p, q)."""


class NotSymmetric(FactorizationError):
    pass


class NotSPD(FactorizationError):
    """Matriz não é simétrica/hermitiana positiva definida."""


class PivotBreakdown(FactorizationError):
    """Pivô nulo na eliminação sem pivoteamento."""


class UnsupportedField(FactorizationError):
    """Algoritmo disponível só para β ∈ {1, 2}."""


class NoDecomposition(FactorizationError):
    """Célula sem algoritmo de decomposição (só composição)."""


# ============================================================
# ARQUIVOS
# ============================================================


class ParseError(FactorizationError):
    """
    Arquivo de matriz malformado.

    Guarda o caminho, a linha (quando o JSON é inválido), o campo e o
    índice da entrada problemática para a mensagem de diagnóstico.
    """

    def __init__(
        self,
        message: str,
        path: str | None = None,
        line: int | None = None,
        field: str | None = None,
        index: int | None = None,
    ):
        self.path = path
        self.line = line
        self.field = field
        self.index = index
        where = []
        if path:
            where.append(str(path))
        if line is not None:
            where.append(f"linha {line}")
        if field:
            where.append(f"campo '{field}'")
        if index is not None:
            where.append(f"índice {index}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")
