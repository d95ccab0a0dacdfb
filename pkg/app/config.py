"""
Configuração — tolerâncias, escala dos amostradores e padrões da varredura.

Todos os valores podem ser sobrescritos por variáveis de ambiente com
prefixo KAK_ (ex.: KAK_MEMBERSHIP_TOL=1e-9).
"""

import os

import numpy as np

MACHINE_EPS = float(np.finfo(float).eps)


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, default))


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, default))


# ============================================================
# TOLERÂNCIAS
# ============================================================
# Resíduos de pertinência e reconstrução são por unidade de n;
# reconstrução é relativa a ‖g‖ e folding relativo a ‖g‖².

MEMBERSHIP_TOL = _env_float("KAK_MEMBERSHIP_TOL", 1e-10)
FACTOR_TOL = _env_float("KAK_FACTOR_TOL", 1e-9)
RECONSTRUCTION_TOL = _env_float("KAK_RECONSTRUCTION_TOL", 1e-9)
ROUNDTRIP_TOL = _env_float("KAK_ROUNDTRIP_TOL", 1e-8)
INVOLUTION_TOL = _env_float("KAK_INVOLUTION_TOL", 1e-10)
GENERATOR_TOL = _env_float("KAK_GENERATOR_TOL", 1e-12)
FOLD_TOL = _env_float("KAK_FOLD_TOL", 1e-9)
SYMMETRY_TOL = _env_float("KAK_SYMMETRY_TOL", 1e-10)
CLUSTER_TOL = _env_float("KAK_CLUSTER_TOL", 1e-8)

# σ_min/‖M‖ abaixo disso => matriz tratada como singular
GL_MARGIN = 1e3 * MACHINE_EPS

# Limite do resíduo de estrutura da exponencial quaterniônica (× eps × ‖E‖)
EXP_STRUCTURE_FACTOR = 1e3

# ============================================================
# AMOSTRAGEM
# ============================================================

DEFAULT_SCALE = _env_float("KAK_SCALE", 0.5)
HYPERBOLIC_SAMPLE_MAX = _env_float("KAK_HYPERBOLIC_MAX", 1.5)

# Passo usado para extrair os geradores do fator do meio
GENERATOR_STEP = 0.5

# ============================================================
# VARREDURA
# ============================================================

SWEEP_TRIALS = _env_int("KAK_SWEEP_TRIALS", 50)
SWEEP_MAX_N = _env_int("KAK_SWEEP_MAX_N", 8)
SWEEP_SEED = _env_int("KAK_SWEEP_SEED", 7)
SWEEP_WORKERS = _env_int("KAK_SWEEP_WORKERS", os.cpu_count() or 1)

LOG_LEVEL = os.getenv("KAK_LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
