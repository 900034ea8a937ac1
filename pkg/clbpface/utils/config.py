"""
CLBPFACE - Configuration Management

Ten moduł zarządza konfiguracją aplikacji:
- Ładowanie zmiennych środowiskowych z .env
- Ścieżki (ORL, cache cech, raporty, baza historii)
- Konfiguracja pipeline'u (deskryptor, sąsiedztwo, siatka, klasyfikator, solver)
- Ustawienie logowania

Użycie:
    from utils.config import Config, PipelineConfig, setup_logging

    setup_logging()
    pipeline = PipelineConfig.from_json_file('pipeline.json').merged(lam=0.005)
    is_valid, errors = Config.validate()
"""

import hashlib
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from dotenv import load_dotenv

from utils.constants import (
    CLASSIFIERS,
    DEFAULT_GRID,
    DEFAULT_LAMBDA,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    DESCRIPTORS,
    MAPPINGS,
)

# Ładowanie .env z katalogu clbpface
BASE_DIR = Path(__file__).resolve().parent.parent
load_dotenv(BASE_DIR / '.env')

logger = logging.getLogger(__name__)


class Config:
    """Centralna konfiguracja aplikacji CLBPFACE"""

    # ============================================
    # PATHS
    # ============================================
    BASE_DIR = BASE_DIR
    ORL_ROOT = Path(os.getenv('ORL_ROOT', str(BASE_DIR / 'data' / 'orl_faces')))
    CACHE_DIR = Path(os.getenv('CACHE_DIR', str(BASE_DIR / 'cache')))
    REPORTS_DIR = Path(os.getenv('REPORTS_DIR', str(BASE_DIR / 'reports')))
    DATABASE_PATH = Path(os.getenv('DATABASE_PATH', str(BASE_DIR / 'clbpface.db')))

    # ============================================
    # APPLICATION SETTINGS
    # ============================================
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    DEFAULT_SEED = int(os.getenv('DEFAULT_SEED', 42))

    # ============================================
    # VALIDATION
    # ============================================

    @classmethod
    def validate(cls) -> Tuple[bool, Dict[str, str]]:
        """
        Waliduje konfigurację aplikacji.

        Returns:
            Tuple[bool, Dict]: (is_valid, errors)

        Example:
            >>> is_valid, errors = Config.validate()
            >>> if not is_valid:
            >>>     print(f"Błędy konfiguracji: {errors}")
        """
        errors = {}

        # ORL nie jest dołączony - brak katalogu to tylko informacja dla harnessu
        if not cls.ORL_ROOT.exists():
            errors['ORL_ROOT'] = (
                f'Katalog ORL nie istnieje: {cls.ORL_ROOT} '
                '(pobierz AT&T "orl_faces" i ustaw ORL_ROOT w .env)'
            )

        if cls.LOG_LEVEL.upper() not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            errors['LOG_LEVEL'] = f'Nieznany poziom logowania: {cls.LOG_LEVEL}'

        for key, path in (('CACHE_DIR', cls.CACHE_DIR), ('REPORTS_DIR', cls.REPORTS_DIR)):
            try:
                path.mkdir(exist_ok=True, parents=True)
            except OSError as e:
                errors[key] = f'Nie można utworzyć katalogu {path}: {e}'

        return len(errors) == 0, errors

    @classmethod
    def print_config(cls):
        """Wyświetla aktualną konfigurację"""
        print("=" * 60)
        print("CLBPFACE - Configuration")
        print("=" * 60)
        print(f"Base Directory: {cls.BASE_DIR}")
        print(f"ORL root: {cls.ORL_ROOT}")
        print(f"Feature cache: {cls.CACHE_DIR}")
        print(f"Reports: {cls.REPORTS_DIR}")
        print(f"Database: {cls.DATABASE_PATH}")
        print(f"\nLog level: {cls.LOG_LEVEL}")
        print(f"Default seed: {cls.DEFAULT_SEED}")
        print("=" * 60)


def setup_logging(level: Optional[str] = None):
    """
    Konfiguruje root logger (jeden handler na stderr).

    Wywoływane raz przez CLI / skrypty; kod biblioteczny tylko loguje.
    """
    level_name = (level or Config.LOG_LEVEL).upper()
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('[%(levelname)s] %(name)s: %(message)s'))
    root.addHandler(handler)
    root.setLevel(level_name)


# ============================================
# PIPELINE CONFIGURATION
# ============================================

# Pola wpływające na wartości cech (hash cache)
_DESCRIPTOR_FIELDS = ('descriptor', 'P', 'R', 'mapping', 'grid', 'include_c')


def parse_grid(text: str) -> List[Tuple[int, int]]:
    """
    Parsuje siatkę w formacie CLI: "1x1,2x2,4x4" -> [(1, 1), (2, 2), (4, 4)].
    """
    levels = []
    for token in text.split(','):
        token = token.strip().lower()
        if not token:
            continue
        try:
            rows, cols = token.split('x')
            levels.append((int(rows), int(cols)))
        except ValueError:
            raise ValueError(f"Niepoprawny poziom siatki '{token}' (oczekiwano RxC, np. 2x2)")
    if not levels:
        raise ValueError(f"Pusta siatka: '{text}'")
    return levels


def _as_int(name: str, value) -> int:
    """8, 8.0 i "8" -> 8; wartości niecałkowite (8.5) są błędem."""
    if isinstance(value, bool):
        raise ValueError(f"{name} musi być liczbą całkowitą, jest {value!r}")
    number = float(value)
    if not number.is_integer():
        raise ValueError(f"{name} musi być liczbą całkowitą, jest {value!r}")
    return int(number)


def _as_bool(name: str, value) -> bool:
    if isinstance(value, bool):
        return value
    if value in (0, 1):
        return bool(value)
    raise ValueError(f"{name} musi być true/false, jest {value!r}")


@dataclass(frozen=True)
class PipelineConfig:
    """
    Pełna konfiguracja pipeline'u: deskryptor + klasyfikator + solver.

    Example:
        >>> cfg = PipelineConfig(descriptor='lbp', mapping='u2', classifier='chi2_nn')
        >>> cfg.descriptor_hash()[:8]
    """
    descriptor: str = 'clbp_s_m'
    P: int = 8
    R: float = 1.0
    mapping: str = 'riu2'
    grid: Tuple[Tuple[int, int], ...] = field(default_factory=lambda: tuple(DEFAULT_GRID))
    include_c: bool = False
    classifier: str = 'src'
    lam: float = DEFAULT_LAMBDA
    max_iter: int = DEFAULT_MAX_ITER
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        # JSON i flagi CLI dają różne typy (1 vs 1.0); po koercji hash deskryptora jest ten sam
        try:
            coerced = {
                'P': _as_int('P', self.P),
                'R': float(self.R),
                'include_c': _as_bool('include_c', self.include_c),
                'lam': float(self.lam),
                'tol': float(self.tol),
                'max_iter': _as_int('max_iter', self.max_iter),
                # grid może przyjść jako lista list (JSON)
                'grid': tuple((_as_int('grid', r), _as_int('grid', c)) for r, c in self.grid),
            }
        except TypeError as e:
            raise ValueError(f"Niepoprawny typ pola konfiguracji: {e}")
        for name, value in coerced.items():
            object.__setattr__(self, name, value)
        if self.descriptor not in DESCRIPTORS:
            raise ValueError(f"Nieznany deskryptor '{self.descriptor}' (dostępne: {DESCRIPTORS})")
        if self.classifier not in CLASSIFIERS:
            raise ValueError(f"Nieznany klasyfikator '{self.classifier}' (dostępne: {CLASSIFIERS})")
        if self.mapping not in MAPPINGS:
            raise ValueError(f"Nieznane mapowanie '{self.mapping}' (dostępne: {MAPPINGS})")
        if self.lam <= 0:
            raise ValueError(f"lambda musi być > 0, jest {self.lam}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter musi być >= 1, jest {self.max_iter}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PipelineConfig':
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"Nieznane klucze konfiguracji: {sorted(unknown)}")
        if isinstance(data.get('grid'), str):
            data = dict(data, grid=parse_grid(data['grid']))
        return cls(**data)

    @classmethod
    def from_json_file(cls, path) -> 'PipelineConfig':
        """Wczytuje plik JSON z tymi samymi kluczami co flagi CLI."""
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding='utf-8'))
        except (OSError, json.JSONDecodeError) as e:
            raise ValueError(f"Nie można wczytać konfiguracji {path}: {e}")
        return cls.from_dict(data)

    def merged(self, **overrides) -> 'PipelineConfig':
        """Nadpisuje wartości (flagi CLI mają pierwszeństwo); None = flaga nie podana."""
        given = {k: v for k, v in overrides.items() if v is not None}
        if isinstance(given.get('grid'), str):
            given['grid'] = parse_grid(given['grid'])
        return replace(self, **given)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['grid'] = [list(level) for level in self.grid]
        return data

    def descriptor_hash(self) -> str:
        """SHA-256 pól deskryptora - unieważnia cache cech po zmianie konfiguracji."""
        payload = {k: v for k, v in self.to_dict().items() if k in _DESCRIPTOR_FIELDS}
        text = json.dumps(payload, sort_keys=True)
        return hashlib.sha256(text.encode('utf-8')).hexdigest()


if __name__ == "__main__":
    # Test konfiguracji
    Config.print_config()

    print("\nValidating configuration...")
    is_valid, errors = Config.validate()

    if is_valid:
        print("[OK] Konfiguracja jest poprawna!")
    else:
        print("[WARN] Uwagi do konfiguracji:")
        for key, error in errors.items():
            print(f"  - {key}: {error}")
        sys.exit(1)
