"""
CLBPFACE - Constants

Centralne miejsce dla stałych używanych w projekcie:
- Układ bazy ORL
- Dostępne deskryptory / mapowania / klasyfikatory
- Domyślna siatka i budżet solvera
- Progi benchmarku ORL

Użycie:
    from utils.constants import ORL_SUBJECTS, DEFAULT_GRID
"""

from typing import Dict, List, Tuple

# ============================================
# ORL DATABASE LAYOUT
# ============================================

ORL_SUBJECTS: int = 40
ORL_IMAGES_PER_SUBJECT: int = 10
ORL_IMAGE_WIDTH: int = 92
ORL_IMAGE_HEIGHT: int = 112
ORL_DOWNLOAD_HINT: str = (
    'ORL/AT&T face database is not bundled; download "att_faces" (s1..s40 with 1.pgm..10.pgm) '
    'and point ORL_ROOT (.env) or --data at it'
)


# ============================================
# PIPELINE CHOICES
# ============================================

DESCRIPTORS: Tuple[str, ...] = ('lbp', 'clbp_s_m')
MAPPINGS: Tuple[str, ...] = ('raw', 'u2', 'riu2')
CLASSIFIERS: Tuple[str, ...] = ('chi2_nn', 'src')
PROTOCOLS: Tuple[str, ...] = ('first_d', 'random_split')

# Piramida 1x1 + 2x2 + 4x4
DEFAULT_GRID: List[Tuple[int, int]] = [(1, 1), (2, 2), (4, 4)]

# Największe P dla tablicy mapowania (2^P wpisów)
MAX_MAPPING_P: int = 16


# ============================================
# SOLVER DEFAULTS
# ============================================

DEFAULT_LAMBDA: float = 0.01
DEFAULT_MAX_ITER: int = 2000
DEFAULT_TOL: float = 1e-8
POWER_ITERATIONS: int = 100


# ============================================
# BENCHMARK TARGETS (ORL)
# ============================================

BENCHMARK_TARGETS: Dict[str, float] = {
    'first_d_min_accuracy': 0.965,     # CLBP_S_M + SRC, d=5
    'random_min_mean': 0.965,          # 10 losowych podziałów, d=5
    'random_max_std': 0.025,
    'lbp_baseline_min_mean': 0.94,     # LBP u2 + chi2 NN
}
