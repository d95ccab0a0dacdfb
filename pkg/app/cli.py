"""
Interface de linha de comando.

Comandos:
    list       catálogo das 53 células (com --n, as partições de cada tamanho)
    sample     amostra um elemento de uma célula e grava g (e os fatores)
    decompose  decompõe g lido de arquivo e grava o diretório de fatores
    verify     verifica um diretório de fatores, ou decompõe e verifica g
    sweep      varredura do catálogo com relatório texto/CSV/Excel
    fold       folding à esquerda ou à direita de um elemento

Códigos de saída: 0 aprovado, 1 falha de verificação, 2 erro de uso/leitura.
"""

import argparse
import logging
import sys

import numpy as np

from app.decompose import DECOMPOSABLE, FoldSide, decompose, fold
from app.errors import (
    BadPartition,
    EmptyCell,
    FactorizationError,
    InvalidParameter,
    NoDecomposition,
    ParseError,
)
from app.groups import membership_residual
from app.matrix_io import read_factors, read_matrix, write_factors, write_matrix
from app.numeric import FieldTag
from app.registry import FactorizationSpec, all_cells, params_for_size, required_params, sample_factored, spec as make_spec
from app.service import SweepConfig, harness_service

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

USAGE_ERRORS = (ParseError, EmptyCell, BadPartition, InvalidParameter, NoDecomposition)

PARAM_NAMES = ("n", "p", "q", "r", "s", "p1", "q1", "p2", "q2")

# ============================================================
# PARSER
# ============================================================


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="limiar de pertinência (os demais mantêm a proporção)")
    common.add_argument("--scale", type=float, default=None, help="escala do amostrador de álgebra")
    common.add_argument("--verbose", action="store_true", help="log em nível DEBUG")
    return common


def _cell_args(parser: argparse.ArgumentParser, required: bool = True):
    parser.add_argument("--fact", required=required, help="família F1..F25")
    parser.add_argument("--beta", type=int, choices=(1, 2, 4), required=required, help="1=ℝ, 2=ℂ, 4=ℍ")
    for name in PARAM_NAMES:
        parser.add_argument(f"--{name}", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="kak", description="Fatorações K₁AK₂ dos grupos de Lie clássicos.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", parents=[common], help="lista as 53 células")
    p_list.add_argument("--n", type=int, default=None, help="mostra as partições para este tamanho")

    p_sample = sub.add_parser("sample", parents=[common], help="amostra um elemento")
    _cell_args(p_sample)
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument("--out", required=True, help="arquivo de saída para g")
    p_sample.add_argument("--factors", default=None, help="diretório para os fatores")

    p_dec = sub.add_parser("decompose", parents=[common], help="decompõe g")
    _cell_args(p_dec)
    p_dec.add_argument("--in", dest="input", required=True)
    p_dec.add_argument("--out", required=True, help="diretório de fatores")

    p_ver = sub.add_parser("verify", parents=[common], help="verifica fatores ou g")
    _cell_args(p_ver, required=False)
    p_ver.add_argument("--in", dest="input", default=None)
    p_ver.add_argument("--factors", default=None, help="diretório de fatores")

    p_sweep = sub.add_parser("sweep", parents=[common], help="varredura do catálogo")
    p_sweep.add_argument("--max-n", type=int, default=None)
    p_sweep.add_argument("--sizes", default=None, help="lista de tamanhos, ex.: 2,4,6")
    p_sweep.add_argument("--trials", type=int, default=None)
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--report", default=None)
    p_sweep.add_argument("--csv", default=None)
    p_sweep.add_argument("--xlsx", default=None)
    p_sweep.add_argument("--filter", default=None, help="células, ex.: F1,F9/R")
    p_sweep.add_argument("--workers", type=int, default=None)

    p_fold = sub.add_parser("fold", parents=[common], help="folding de um elemento")
    _cell_args(p_fold, required=False)
    p_fold.add_argument("--side", choices=("left", "right"), required=True)
    p_fold.add_argument("--seed", type=int, default=0)
    p_fold.add_argument("--factors", default=None, help="usa o elemento gravado em vez de amostrar")
    p_fold.add_argument("--out", default=None, help="grava a matriz dobrada")

    return parser


# ============================================================
# COMANDOS
# ============================================================


def _spec_from_args(args) -> FactorizationSpec:
    if not args.fact or args.beta is None:
        raise InvalidParameter("informe --fact e --beta")
    params = {name: getattr(args, name) for name in PARAM_NAMES if getattr(args, name) is not None}
    return make_spec(args.fact, args.beta, params)


def cmd_list(args) -> int:
    for fid, beta in all_cells():
        if args.n is None:
            print(f"{fid}/{FieldTag.from_beta(beta).value:<2} parâmetros: {','.join(required_params(fid))}")
            continue
        for params in params_for_size(fid, beta, args.n):
            s = make_spec(fid, beta, params)
            print(
                f"{s.cell_id:<6} [{s.params_label()}] {s.ambient.label()} = "
                f"{s.k1.label()} · {s.template.value} · {s.k2.label()}  ({s.angle_count} ângulos, {s.angle_domain.value})"
            )
    return EXIT_OK


def cmd_sample(args) -> int:
    spec_ = _spec_from_args(args)
    fe = sample_factored(spec_, np.random.default_rng(args.seed), harness_service.scale)
    write_matrix(fe.g, args.out)
    if args.factors:
        write_factors(fe, args.factors)
    print(f"{spec_.cell_id} [{spec_.params_label()}] θ = {np.round(fe.theta.as_array(), 6).tolist()}")
    return EXIT_OK


def cmd_decompose(args) -> int:
    spec_ = _spec_from_args(args)
    fe = decompose(spec_, read_matrix(args.input))
    write_factors(fe, args.out)
    report = harness_service.verify(fe, decomposed=True)
    print(report.summary())
    print(f"θ = {fe.theta.as_array().tolist()}")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    if args.factors:
        report = harness_service.verify(read_factors(args.factors), decomposed=True)
        print(report.summary())
        return EXIT_OK if report.passed else EXIT_FAIL
    if not args.input:
        raise InvalidParameter("informe --factors ou --in")
    spec_ = _spec_from_args(args)
    g = read_matrix(args.input)
    if (spec_.fid, spec_.beta) in DECOMPOSABLE:
        report = harness_service.verify(decompose(spec_, g), decomposed=True)
        print(report.summary())
        return EXIT_OK if report.passed else EXIT_FAIL

    # célula só de composição: apenas a pertinência ao grupo ambiente
    residual = membership_residual(spec_.ambient, g)
    passed = residual <= harness_service.thresholds.factor * max(1, spec_.size)
    print(f"{spec_.cell_id} [{spec_.params_label()}] {'PASS' if passed else 'FAIL'}")
    print(f"  pertinência a {spec_.ambient.label()}: {residual:.3e}")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_sweep(args) -> int:
    kwargs = {"thresholds": harness_service.thresholds, "scale": harness_service.scale}
    if args.sizes:
        try:
            kwargs["sizes"] = [int(s) for s in args.sizes.split(",") if s.strip()]
        except ValueError:
            raise InvalidParameter(f"--sizes inválido: {args.sizes!r}")
    elif args.max_n is not None:
        kwargs["sizes"] = list(range(1, args.max_n + 1))
    for key, value in (("trials", args.trials), ("seed", args.seed), ("workers", args.workers)):
        if value is not None:
            kwargs[key] = value
    if args.filter:
        kwargs["cell_filter"] = [f.strip() for f in args.filter.split(",") if f.strip()]
    config = SweepConfig(report_path=args.report, csv_path=args.csv, xlsx_path=args.xlsx, **kwargs)

    df = harness_service.sweep(config)
    passed = int(df["passed"].sum()) if not df.empty else 0
    cells = df.groupby("cell", sort=False)["passed"].all() if not df.empty else []
    print(f"{passed}/{len(df)} tarefas aprovadas; {int(sum(cells))}/{len(cells)} células")
    for cell, ok in (cells.items() if len(cells) else []):
        if not ok:
            print(f"  FAIL {cell}")
    return EXIT_OK if passed == len(df) else EXIT_FAIL


def cmd_fold(args) -> int:
    if args.factors:
        fe = read_factors(args.factors)
    else:
        spec_ = _spec_from_args(args)
        fe = sample_factored(spec_, np.random.default_rng(args.seed), harness_service.scale)
    result = fold(fe, FoldSide.LEFT if args.side == "left" else FoldSide.RIGHT)
    relative = result.residual / max(1.0, fe.g.norm() ** 2)
    passed = relative <= harness_service.thresholds.fold
    if args.out:
        write_matrix(result.matrix, args.out)
    print(f"{fe.spec.cell_id} [{fe.spec.params_label()}] folding {result.side.value}: {'PASS' if passed else 'FAIL'}")
    print(f"  resíduo relativo a ‖g‖²: {relative:.3e}")
    return EXIT_OK if passed else EXIT_FAIL


COMMANDS = {
    "list": cmd_list,
    "sample": cmd_sample,
    "decompose": cmd_decompose,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "fold": cmd_fold,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    try:
        harness_service.configure(tol=args.tol, scale=args.scale)
        return COMMANDS[args.command](args)
    except USAGE_ERRORS as e:
        print(f"[erro] {e}", file=sys.stderr)
        return EXIT_USAGE
    except FactorizationError as e:
        print(f"[falha] {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL
