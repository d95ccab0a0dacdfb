"""
Leitura e escrita de matrizes e de diretórios de fatores.

Formato de matriz (JSON):
    {"field": "C", "rows": 2, "cols": 2, "entries": [[1.0, 0.0], ...]}

Entradas em ordem row-major: número (R), [re, im] (C) ou [w, x, y, z] (H).
O json do Python escreve floats com repr, que faz round-trip exato em binary64.

Diretório de fatores:
    g.mat, k1_0.mat, ..., k2_0.mat, ..., theta.json
"""

import json
import logging
from numbers import Real
from pathlib import Path

import numpy as np

from app.errors import ParseError
from app.numeric import DenseMatrix, FieldTag
from app.registry import FactoredElement, assemble, spec as make_spec

logger = logging.getLogger(__name__)

_ARITY = {FieldTag.R: 1, FieldTag.C: 2, FieldTag.H: 4}

# ============================================================
# MATRIZES
# ============================================================


def matrix_to_dict(m: DenseMatrix) -> dict:
    if m.field is FieldTag.H:
        entries = m.data.reshape(-1, 4).tolist()
    elif m.field is FieldTag.C:
        flat = m.data.ravel()
        entries = np.stack([flat.real, flat.imag], axis=-1).tolist()
    else:
        entries = m.data.ravel().tolist()
    return {"field": m.field.value, "rows": m.rows, "cols": m.cols, "entries": entries}


def _is_number(v) -> bool:
    return isinstance(v, Real) and not isinstance(v, bool)


def _check_entry(v, fld: FieldTag, index: int, path) -> None:
    arity = _ARITY[fld]
    if arity == 1:
        if not _is_number(v):
            raise ParseError(f"entrada real deve ser um número, recebido {v!r}", path=path, field="entries", index=index)
        return
    if not isinstance(v, list) or len(v) != arity:
        got = len(v) if isinstance(v, list) else type(v).__name__
        raise ParseError(f"entrada {fld.value} precisa de {arity} componentes, recebido {got}", path=path, field="entries", index=index)
    if not all(_is_number(x) for x in v):
        raise ParseError(f"componentes não numéricas: {v!r}", path=path, field="entries", index=index)


def _dim(obj: dict, key: str, path) -> int:
    value = obj.get(key)
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ParseError(f"dimensão inválida: {value!r}", path=path, field=key)
    return value


def matrix_from_dict(obj, path=None) -> DenseMatrix:
    """
    Valida e converte um objeto já decodificado.

    Raises:
        ParseError: campo ausente, corpo desconhecido, contagem ou aridade errada
    """
    if not isinstance(obj, dict):
        raise ParseError("esperado um objeto JSON", path=path)
    try:
        fld = FieldTag(obj.get("field"))
    except ValueError:
        raise ParseError(f"corpo desconhecido: {obj.get('field')!r}", path=path, field="field")
    rows, cols = _dim(obj, "rows", path), _dim(obj, "cols", path)

    entries = obj.get("entries")
    if not isinstance(entries, list):
        raise ParseError("'entries' deve ser uma lista", path=path, field="entries")
    if len(entries) != rows * cols:
        raise ParseError(f"esperadas {rows * cols} entradas, recebidas {len(entries)}", path=path, field="entries")
    for index, v in enumerate(entries):
        _check_entry(v, fld, index, path)

    if fld is FieldTag.R:
        data = np.array(entries, dtype=float).reshape(rows, cols)
    elif fld is FieldTag.C:
        pairs = np.array(entries, dtype=float).reshape(rows, cols, 2)
        data = pairs[..., 0] + 1j * pairs[..., 1]
    else:
        data = np.array(entries, dtype=float).reshape(rows, cols, 4)
    return DenseMatrix(fld, data)


def read_matrix(path) -> DenseMatrix:
    """
    Lê uma matriz do arquivo.

    Raises:
        ParseError: JSON inválido (com a linha) ou conteúdo fora do formato
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"não foi possível ler o arquivo: {e}", path=str(path)) from e
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"JSON inválido: {e.msg}", path=str(path), line=e.lineno) from e
    m = matrix_from_dict(obj, path=str(path))
    logger.debug(f"Lido {path}: {m.rows}x{m.cols} sobre {m.field.value}")
    return m


def write_matrix(m: DenseMatrix, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(matrix_to_dict(m)) + "\n", encoding="utf-8")
    logger.debug(f"Escrito {path}: {m.rows}x{m.cols} sobre {m.field.value}")
    return path


# ============================================================
# DIRETÓRIOS DE FATORES
# ============================================================


def parse_cell(cell: str) -> tuple[str, int]:
    """'F9/R' → ('F9', 1)."""
    try:
        fid, tag = cell.split("/")
        return fid, FieldTag(tag).beta
    except (ValueError, AttributeError):
        raise ParseError(f"célula inválida: {cell!r} (esperado 'F9/R')", field="cell")


def write_factors(fe: FactoredElement, directory) -> Path:
    """Grava g, os fatores brutos de cada lado e θ com a identificação da célula."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_matrix(fe.g, directory / "g.mat")
    for side, raw in (("k1", fe.k1_raw), ("k2", fe.k2_raw)):
        for i, m in enumerate(raw):
            write_matrix(m, directory / f"{side}_{i}.mat")
    meta = {
        "values": list(fe.theta.values),
        "domain": fe.theta.domain.value,
        "cell": fe.spec.cell_id,
        "params": fe.spec.params_dict(),
    }
    (directory / "theta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    logger.info(f"Fatores de {fe.spec.cell_id} gravados em {directory}")
    return directory


def _read_side(directory: Path, side: str, expected: int) -> tuple[DenseMatrix, ...]:
    found = {p.name for p in directory.glob(f"{side}_*.mat")}
    wanted = {f"{side}_{i}.mat" for i in range(expected)}
    if found != wanted:
        raise ParseError(
            f"esperados {expected} arquivos {side}_i.mat, encontrados {sorted(found)}",
            path=str(directory),
            field=side,
        )
    return tuple(read_matrix(directory / f"{side}_{i}.mat") for i in range(expected))


def read_factors(directory) -> FactoredElement:
    """
    Reconstrói o FactoredElement de um diretório de fatores.

    Não valida pertinência nem domínio dos ângulos; isso fica para o
    relatório de verificação.

    Raises:
        ParseError: theta.json ausente ou malformado, ou arquivos de fator
            faltando ou sobrando
    """
    directory = Path(directory)
    meta_path = directory / "theta.json"
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ParseError(f"não foi possível ler: {e}", path=str(meta_path)) from e
    except json.JSONDecodeError as e:
        raise ParseError(f"JSON inválido: {e.msg}", path=str(meta_path), line=e.lineno) from e

    if not isinstance(meta, dict):
        raise ParseError("theta.json deve conter um objeto", path=str(meta_path))
    for key in ("values", "cell", "params"):
        if key not in meta:
            raise ParseError("campo obrigatório ausente", path=str(meta_path), field=key)
    params = meta["params"]
    if not isinstance(params, dict) or not all(isinstance(v, int) and not isinstance(v, bool) for v in params.values()):
        raise ParseError("'params' deve ser um objeto de inteiros", path=str(meta_path), field="params")
    fid, beta = parse_cell(meta["cell"])
    spec_ = make_spec(fid, beta, params)
    values = meta["values"]
    if not isinstance(values, list) or not all(_is_number(v) for v in values):
        raise ParseError("'values' deve ser uma lista de números", path=str(meta_path), field="values")
    if len(values) != spec_.angle_count:
        raise ParseError(f"{spec_.cell_id} espera {spec_.angle_count} ângulos, recebeu {len(values)}", path=str(meta_path), field="values")

    g = read_matrix(directory / "g.mat")
    k1 = _read_side(directory, "k1", len(spec_.k1.groups))
    k2 = _read_side(directory, "k2", len(spec_.k2.groups))
    return assemble(spec_, k1, np.array(values, dtype=float), k2, g)
