"""
Serviço de verificação — relatórios por elemento e varredura do catálogo.

Para cada célula (fid, β), tamanho e partição: compõe amostras e mede
reconstrução e pertinência, confere as identidades de folding e a
consistência das involuções e, nas células com algoritmo, faz o
round-trip compose → decompose. O resultado fica num DataFrame em
memória e pode ser gravado como relatório texto, CSV ou Excel.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd

from app.config import (
    DEFAULT_SCALE,
    FACTOR_TOL,
    FOLD_TOL,
    GENERATOR_TOL,
    INVOLUTION_TOL,
    MEMBERSHIP_TOL,
    RECONSTRUCTION_TOL,
    ROUNDTRIP_TOL,
    SWEEP_MAX_N,
    SWEEP_SEED,
    SWEEP_TRIALS,
    SWEEP_WORKERS,
)
from app.decompose import DECOMPOSABLE, FoldSide, decompose, fold
from app.errors import FactorizationError, InvalidParameter
from app.groups import membership_residual
from app.numeric import FieldTag
from app.registry import (
    FactoredElement,
    FactorizationSpec,
    all_cells,
    consistency_check,
    fid_number,
    params_for_size,
    sample_factored,
    spec as make_spec,
)
from app.templates import build_middle

logger = logging.getLogger(__name__)

# ============================================================
# LIMIARES
# ============================================================


@dataclass(frozen=True)
class Thresholds:
    """Limiares de aprovação; pertinência e reconstrução são por unidade de n."""

    membership: float = MEMBERSHIP_TOL
    factor: float = FACTOR_TOL
    reconstruction: float = RECONSTRUCTION_TOL
    roundtrip: float = ROUNDTRIP_TOL
    fold: float = FOLD_TOL
    involution: float = INVOLUTION_TOL
    generator: float = GENERATOR_TOL

    @classmethod
    def scaled(cls, membership: float) -> "Thresholds":
        """Novo limiar de pertinência; os demais mantêm a proporção com o padrão."""
        if membership <= 0:
            raise InvalidParameter(f"tolerância deve ser positiva, recebeu {membership}")
        ratio = membership / MEMBERSHIP_TOL
        return cls(**{k: v * ratio for k, v in asdict(cls()).items()})

    def header(self) -> str:
        return " ".join(f"{k}={v:.1e}" for k, v in asdict(self).items())


# ============================================================
# RELATÓRIOS
# ============================================================


@dataclass
class VerificationReport:
    cell: str
    params: str
    reconstruction: float
    membership: float
    factor_residuals: list[tuple[str, float]]
    angle_violations: int
    roundtrip_deviation: float | None
    passed: bool
    seed: int | None = None
    timings_ms: dict[str, float] = field(default_factory=dict)
    thresholds: Thresholds = field(default_factory=Thresholds)

    @property
    def worst_factor(self) -> float:
        return max((r for _, r in self.factor_residuals), default=0.0)

    def summary(self) -> str:
        lines = [
            f"{self.cell} [{self.params}] {'PASS' if self.passed else 'FAIL'}",
            f"  reconstrução (relativa): {self.reconstruction:.3e}",
            f"  pertinência ambiente:    {self.membership:.3e}",
        ]
        lines += [f"  {label}: {r:.3e}" for label, r in self.factor_residuals]
        lines.append(f"  ângulos fora do domínio: {self.angle_violations}")
        if self.roundtrip_deviation is not None:
            lines.append(f"  desvio de θ no round-trip: {self.roundtrip_deviation:.3e}")
        return "\n".join(lines)


def _safe(fn) -> float:
    try:
        return float(fn())
    except FactorizationError as e:
        logger.debug(f"resíduo indisponível: {e}")
        return float("inf")


def _canonical_theta(fe: FactoredElement) -> np.ndarray:
    return fe.theta.canonical(reflect=fe.spec.sign_symmetric).as_array()


@dataclass
class SweepConfig:
    sizes: list[int] = field(default_factory=lambda: list(range(1, SWEEP_MAX_N + 1)))
    trials: int = SWEEP_TRIALS
    seed: int = SWEEP_SEED
    thresholds: Thresholds = field(default_factory=Thresholds)
    scale: float = DEFAULT_SCALE
    cell_filter: list[str] | None = None
    report_path: str | None = None
    csv_path: str | None = None
    xlsx_path: str | None = None
    workers: int = SWEEP_WORKERS

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidParameter(f"trials deve ser ≥ 1, recebeu {self.trials}")
        if not self.sizes or any(s < 1 for s in self.sizes):
            raise InvalidParameter(f"tamanhos devem ser ≥ 1, recebeu {self.sizes}")
        if self.workers < 1:
            raise InvalidParameter(f"workers deve ser ≥ 1, recebeu {self.workers}")

    def selects(self, fid: str, beta: int) -> bool:
        if not self.cell_filter:
            return True
        tag = f"{fid}/{FieldTag.from_beta(beta).value}"
        return any(f.upper() in (fid, tag) for f in self.cell_filter)


REPORT_COLUMNS = [
    "cell",
    "size",
    "params",
    "trials",
    "compose_passed",
    "reconstruction",
    "membership",
    "factor",
    "angle_violations",
    "fold",
    "consistency",
    "roundtrip",
    "passed",
    "error",
]

# ============================================================
# SERVIÇO
# ============================================================


class HarnessService:
    """
    Serviço central de verificação.

    Mantém limiares e escala do amostrador e guarda o DataFrame da
    última varredura.
    """

    def __init__(self):
        self.thresholds = Thresholds()
        self.scale = DEFAULT_SCALE
        self.results = pd.DataFrame(columns=REPORT_COLUMNS + ["elapsed_ms"])
        self.last_sweep: datetime | None = None

    def configure(self, tol: float | None = None, scale: float | None = None):
        """Redefine limiares e escala; None volta ao padrão da configuração."""
        if scale is not None and scale <= 0:
            raise InvalidParameter(f"escala deve ser positiva, recebeu {scale}")
        self.thresholds = Thresholds.scaled(tol) if tol is not None else Thresholds()
        self.scale = scale if scale is not None else DEFAULT_SCALE

    # ========================================================
    # VERIFICAÇÃO DE UM ELEMENTO
    # ========================================================

    def verify(
        self,
        fe: FactoredElement,
        decomposed: bool = False,
        seed: int | None = None,
        thresholds: Thresholds | None = None,
    ) -> VerificationReport:
        """
        Mede todos os resíduos de um elemento fatorado.

        Reconstrução ‖k₁·a(θ)·k₂ − g‖/‖g‖ e pertinências são comparadas com
        limiar × n; fatores vindos de uma decomposição usam o limiar de
        fator (mais largo) em vez do de composição.
        """
        th = thresholds or self.thresholds
        spec_ = fe.spec
        n = max(1, spec_.size)
        timings = {}

        t0 = time.perf_counter()
        violations = fe.theta.violations() + abs(len(fe.theta) - spec_.angle_count)
        if len(fe.theta) == spec_.angle_count:
            rebuilt = fe.k1 @ build_middle(spec_, fe.theta) @ fe.k2
            reconstruction = (rebuilt - fe.g).norm() / max(1.0, fe.g.norm())
        else:
            reconstruction = float("inf")
        timings["reconstruction"] = (time.perf_counter() - t0) * 1e3

        t0 = time.perf_counter()
        factor_tol = th.factor if decomposed else th.membership
        membership = _safe(lambda: membership_residual(spec_.ambient, fe.g))
        factors = []
        factors_ok = True
        for side, groups, raw in ((1, spec_.k1.groups, fe.k1_raw), (2, spec_.k2.groups, fe.k2_raw)):
            for i, (group, m) in enumerate(zip(groups, raw)):
                residual = _safe(lambda: membership_residual(group, m))
                factors.append((f"k{side}[{i}] ∈ {group.label()}", residual))
                factors_ok = factors_ok and residual <= factor_tol * max(1, group.size)
            if len(raw) != len(groups):
                factors.append((f"k{side}: {len(raw)} fatores para {len(groups)} grupos", float("inf")))
                factors_ok = False
        timings["membership"] = (time.perf_counter() - t0) * 1e3

        passed = (
            reconstruction <= th.reconstruction * n
            and membership <= factor_tol * n
            and factors_ok
            and violations == 0
        )
        report = VerificationReport(
            cell=spec_.cell_id,
            params=spec_.params_label(),
            reconstruction=reconstruction,
            membership=membership,
            factor_residuals=factors,
            angle_violations=violations,
            roundtrip_deviation=None,
            passed=bool(passed),
            seed=seed,
            timings_ms=timings,
            thresholds=th,
        )
        logger.debug(f"{spec_.cell_id} [{report.params}]: {'ok' if passed else 'falhou'}")
        return report

    def roundtrip(
        self,
        spec_: FactorizationSpec,
        rng: np.random.Generator,
        seed: int | None = None,
        scale: float | None = None,
        thresholds: Thresholds | None = None,
    ) -> VerificationReport:
        """
        compose → decompose → compara θ canônico.

        Raises:
            NoDecomposition: célula sem algoritmo
        """
        source = sample_factored(spec_, rng, scale or self.scale)
        t0 = time.perf_counter()
        recovered = decompose(spec_, source.g)
        elapsed = (time.perf_counter() - t0) * 1e3
        report = self.verify(recovered, decomposed=True, seed=seed, thresholds=thresholds)
        deviation = float(np.max(np.abs(_canonical_theta(source) - _canonical_theta(recovered)), initial=0.0))
        report.roundtrip_deviation = deviation
        report.passed = report.passed and deviation <= report.thresholds.roundtrip
        report.timings_ms["decompose"] = elapsed
        return report

    # ========================================================
    # VARREDURA
    # ========================================================

    def _run_task(self, config: SweepConfig, task: tuple) -> dict:
        cell_index, fid, beta, size, part_index, params = task
        key = (cell_index, size, part_index)
        rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=key))
        record = {
            "cell": f"{fid}/{FieldTag.from_beta(beta).value}",
            "size": size,
            "params": ",".join(f"{k}={v}" for k, v in params.items()),
            "trials": config.trials,
            "compose_passed": 0,
            "reconstruction": 0.0,
            "membership": 0.0,
            "factor": 0.0,
            "angle_violations": 0,
            "fold": 0.0,
            "consistency": True,
            "roundtrip": np.nan,
            "passed": False,
            "error": "",
        }
        t0 = time.perf_counter()
        th = config.thresholds
        try:
            spec_ = make_spec(fid, beta, params)
            for _ in range(config.trials):
                fe = sample_factored(spec_, rng, config.scale)
                rep = self.verify(fe, thresholds=th)
                record["compose_passed"] += int(rep.passed)
                record["reconstruction"] = max(record["reconstruction"], rep.reconstruction)
                record["membership"] = max(record["membership"], rep.membership)
                record["factor"] = max(record["factor"], rep.worst_factor)
                record["angle_violations"] += rep.angle_violations
                scale2 = max(1.0, fe.g.norm() ** 2)
                for side in FoldSide:
                    record["fold"] = max(record["fold"], fold(fe, side).residual / scale2)

            consistency = consistency_check(spec_, rng, scale=config.scale)
            record["consistency"] = bool(
                consistency.involution_residual <= th.involution
                and consistency.automorphism_residual <= th.involution
                and consistency.generator_residual <= th.generator
                and consistency.commutation_residual <= th.generator
            )

            roundtrip_ok = True
            if (fid, beta) in DECOMPOSABLE:
                worst = 0.0
                for _ in range(config.trials):
                    rep = self.roundtrip(spec_, rng, scale=config.scale, thresholds=th)
                    worst = max(worst, rep.roundtrip_deviation)
                    roundtrip_ok = roundtrip_ok and rep.passed
                record["roundtrip"] = worst

            record["passed"] = bool(
                record["compose_passed"] == config.trials
                and record["fold"] <= th.fold
                and record["consistency"]
                and roundtrip_ok
            )
        except (FactorizationError, np.linalg.LinAlgError, ValueError) as e:
            record["error"] = f"{type(e).__name__}: {e}"
            logger.warning(f"{record['cell']} n={size} [{record['params']}]: {record['error']}")
        record["elapsed_ms"] = (time.perf_counter() - t0) * 1e3
        if not record["passed"] and not record["error"]:
            logger.warning(f"{record['cell']} n={size} [{record['params']}]: falhou")
        return record

    def _tasks(self, config: SweepConfig) -> list[tuple]:
        tasks = []
        for cell_index, (fid, beta) in enumerate(all_cells()):
            if not config.selects(fid, beta):
                continue
            for size in config.sizes:
                for part_index, params in enumerate(params_for_size(fid, beta, size)):
                    tasks.append((cell_index, fid, beta, size, part_index, params))
        return tasks

    def sweep(self, config: SweepConfig) -> pd.DataFrame:
        """
        Varre as células selecionadas e grava os relatórios configurados.

        Falhas de uma célula não interrompem a varredura: ficam na coluna
        'error' e a célula é marcada como reprovada.
        """
        tasks = self._tasks(config)
        logger.info("=" * 60)
        logger.info(f"VARREDURA: {len(tasks)} tarefas, {config.trials} tentativas, seed={config.seed}")
        logger.info("=" * 60)

        # a execução paralela não altera a ordem: cada tarefa tem seu próprio gerador
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(lambda t: self._run_task(config, t), tasks))

        df = pd.DataFrame(records, columns=REPORT_COLUMNS + ["elapsed_ms"])
        if not df.empty:
            df["_order"] = df["cell"].map(_cell_order)
            df = df.sort_values(["_order", "size", "params"], kind="stable").drop(columns="_order")
            df = df.reset_index(drop=True)
        self.results = df
        self.last_sweep = datetime.now()

        passed = int(df["passed"].sum()) if not df.empty else 0
        logger.info(f"✓ {passed}/{len(df)} tarefas aprovadas")
        self.write_report(df, config)
        return df

    def write_report(self, df: pd.DataFrame, config: SweepConfig) -> list[Path]:
        """Grava os formatos pedidos em config; retorna os caminhos escritos."""
        written = []
        if config.report_path:
            path = Path(config.report_path)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(format_report(df, config), encoding="utf-8")
            written.append(path)
        if config.csv_path:
            path = Path(config.csv_path)
            path.parent.mkdir(parents=True, exist_ok=True)
            df.drop(columns="elapsed_ms").to_csv(path, index=False)
            written.append(path)
        if config.xlsx_path:
            path = Path(config.xlsx_path)
            path.parent.mkdir(parents=True, exist_ok=True)
            df.to_excel(path, index=False, engine="openpyxl")
            written.append(path)
        for path in written:
            logger.info(f"Relatório gravado: {path}")
        return written

    def get_status(self) -> dict:
        """Retorna status do serviço."""
        df = self.results
        failed = df.loc[~df["passed"].astype(bool), "cell"].unique().tolist() if not df.empty else []
        return {
            "last_sweep": self.last_sweep.isoformat() if self.last_sweep else None,
            "tasks": len(df),
            "passed": int(df["passed"].sum()) if not df.empty else 0,
            "failed_cells": failed,
            "thresholds": asdict(self.thresholds),
            "scale": self.scale,
        }


def _cell_order(cell: str) -> tuple[int, int]:
    fid, tag = cell.split("/")
    return fid_number(fid), FieldTag(tag).beta


def format_report(df: pd.DataFrame, config: SweepConfig) -> str:
    """Relatório texto, uma linha por (célula, tamanho, partição), sem tempos."""
    lines = [
        f"# varredura K1AK2 seed={config.seed} trials={config.trials} sizes={','.join(map(str, config.sizes))} scale={config.scale}",
        f"# limiares {config.thresholds.header()}",
    ]
    for row in df.itertuples(index=False):
        roundtrip = "-" if pd.isna(row.roundtrip) else f"{row.roundtrip:.3e}"
        line = (
            f"{row.cell:<6} n={row.size:<2} [{row.params}] "
            f"compose={row.compose_passed}/{row.trials} "
            f"recon={row.reconstruction:.3e} memb={row.membership:.3e} fator={row.factor:.3e} "
            f"viol={row.angle_violations} fold={row.fold:.3e} "
            f"consist={'ok' if row.consistency else 'falhou'} roundtrip={roundtrip} "
            f"{'PASS' if row.passed else 'FAIL'}"
        )
        if row.error:
            line += f" erro={row.error}"
        lines.append(line)
    passed = int(df["passed"].sum()) if not df.empty else 0
    lines.append(f"# total {passed}/{len(df)} aprovadas")
    return "\n".join(lines) + "\n"


# Singleton
harness_service = HarnessService()
