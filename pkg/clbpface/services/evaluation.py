"""
CLBPFACE - Evaluation Harness

Protokoły oceny na zbiorze etykietowanym (ORL lub syntetycznym):
- first_d: pierwsze d obrazów każdej klasy to trening, reszta test
- random_split: d obrazów każdej klasy losowanych bez zwracania, powtórzone
  `runs` razy; generator Philox z kluczem SHA-256(seed, run, klasa)

Cechy liczone raz na obraz (opcjonalnie z cache CSV), potem dla każdego
podziału: galeria (chi2_nn) albo słownik (src), klasyfikacja wszystkich
próbek testowych, accuracy = poprawne / wszystkie.

Użycie:
    from services.evaluation import Protocol, run_protocol

    report = run_protocol(dataset, Protocol('random_split', d=5, runs=10, seed=42), config)
    print(f"{report.mean:.4f} +/- {report.std:.4f}")
"""

import hashlib
import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from collectors.orl_collector import LabeledDataset
from descriptors.feature_cache import FeatureTable, load_cached, stack_features, write_feature_csv
from descriptors.features import extract_feature
from services.classifier import build_dictionary, nn_classify, src_classify
from services.l1_solver import SolverParams
from utils.config import PipelineConfig

logger = logging.getLogger(__name__)

# Zgodność mean ze średnią per_run_accuracy (np. po ręcznej edycji raportu JSON)
MEAN_TOLERANCE = 1e-12

Split = Tuple[np.ndarray, np.ndarray]


class ProtocolKind(str, Enum):
    FIRST_D = 'first_d'
    RANDOM_SPLIT = 'random_split'


@dataclass(frozen=True)
class Protocol:
    """Protokół oceny; runs i seed mają znaczenie tylko dla random_split."""
    kind: ProtocolKind
    d: int
    runs: int = 1
    seed: int = 0

    def __post_init__(self):
        kind = 'random_split' if self.kind == 'random' else self.kind
        object.__setattr__(self, 'kind', ProtocolKind(kind))
        if self.d < 1:
            raise ValueError(f"d musi być >= 1, jest {self.d}")
        if self.runs < 1:
            raise ValueError(f"runs musi być >= 1, jest {self.runs}")
        if self.kind is ProtocolKind.FIRST_D:
            object.__setattr__(self, 'runs', 1)

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind.value, 'd': self.d, 'runs': self.runs, 'seed': self.seed}


@dataclass(frozen=True)
class EvalReport:
    """
    Wynik protokołu. Accuracy jako ułamek w [0, 1]; std = odchylenie próbkowe
    (mianownik n-1), 0.0 dla pojedynczego przebiegu.
    """
    per_run_accuracy: Tuple[float, ...]
    mean: float
    std: float
    protocol: Dict[str, Any]
    config_echo: Dict[str, Any]
    timing: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.per_run_accuracy:
            raise ValueError("Raport musi zawierać co najmniej jeden przebieg")
        if any(not 0.0 <= a <= 1.0 for a in self.per_run_accuracy):
            raise ValueError(f"Accuracy poza [0, 1]: {self.per_run_accuracy}")
        if self.std < 0:
            raise ValueError(f"std musi być >= 0, jest {self.std}")
        expected = float(np.mean(self.per_run_accuracy))
        if abs(self.mean - expected) > MEAN_TOLERANCE:
            raise ValueError(f"mean {self.mean} != średnia przebiegów {expected}")

    @classmethod
    def from_accuracies(cls, accuracies: Sequence[float], protocol: Protocol,
                        config: PipelineConfig, timing: Optional[Dict[str, float]] = None) -> 'EvalReport':
        values = np.asarray(accuracies, dtype=np.float64)
        if values.size == 0:
            raise ValueError("Raport musi zawierać co najmniej jeden przebieg")
        std = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
        return cls(
            per_run_accuracy=tuple(float(a) for a in values),
            mean=float(np.mean(values)),
            std=std,
            protocol=protocol.to_dict(),
            config_echo=config.to_dict(),
            timing=dict(timing or {}),
        )


# ============================================
# SPLITS
# ============================================

def _check_feasible(dataset: LabeledDataset, d: int):
    if d < 1:
        raise ValueError(f"d musi być >= 1, jest {d}")
    counts = dataset.class_counts()
    short = {label: count for label, count in counts.items() if count <= d}
    if short:
        raise ValueError(
            f"d={d} niewykonalne: klasy {sorted(short)} mają <= {d} obrazów "
            f"(minimum w zbiorze: {min(counts.values())})"
        )


def split_first_d(dataset: LabeledDataset, d: int) -> Split:
    """
    Pierwsze d obrazów każdej klasy (w kolejności zbioru) -> trening.

    Example:
        >>> train, test = split_first_d(orl, 5)
        >>> train.size, test.size
        (200, 200)
    """
    _check_feasible(dataset, d)
    train = np.concatenate([dataset.indices_of(label)[:d] for label in range(dataset.class_count)])
    return _as_split(train, len(dataset))


def split_key(seed: int, run_index: int, label: int) -> int:
    """128-bitowy klucz Philox: pierwsze 16 bajtów SHA-256("seed:run:klasa")."""
    digest = hashlib.sha256(f"{seed}:{run_index}:{label}".encode('ascii')).digest()
    return int.from_bytes(digest[:16], 'little')


def split_random(dataset: LabeledDataset, d: int, run_index: int, seed: int) -> Split:
    """
    d losowych obrazów każdej klasy -> trening (bez zwracania).

    Dla każdej klasy osobny strumień Philox z kluczem split_key(seed, run, klasa),
    więc podział jednej klasy nie zależy od liczby obrazów pozostałych.
    """
    _check_feasible(dataset, d)
    chosen = []
    for label in range(dataset.class_count):
        members = dataset.indices_of(label)
        rng = np.random.Generator(np.random.Philox(key=split_key(seed, run_index, label)))
        chosen.append(members[rng.permutation(members.size)[:d]])
    return _as_split(np.concatenate(chosen), len(dataset))


def _as_split(train: np.ndarray, total: int) -> Split:
    train = np.sort(train.astype(np.int64))
    test = np.setdiff1d(np.arange(total, dtype=np.int64), train)
    return train, test


def protocol_splits(dataset: LabeledDataset, protocol: Protocol) -> List[Split]:
    if protocol.kind is ProtocolKind.FIRST_D:
        return [split_first_d(dataset, protocol.d)]
    return [split_random(dataset, protocol.d, run, protocol.seed) for run in range(protocol.runs)]


# ============================================
# FEATURES
# ============================================

def extract_dataset_features(dataset: LabeledDataset, config: PipelineConfig,
                             cache_path: Optional[Path] = None) -> FeatureTable:
    """
    Wektory cech dla wszystkich obrazów (wiersz i = obraz i zbioru).

    Gdy podano cache_path: najpierw próba odczytu (hash konfiguracji, odcisk
    zbioru i etykiety muszą się zgadzać), po ekstrakcji zapis.
    """
    fingerprint = dataset.fingerprint()
    if cache_path is not None:
        cached = load_cached(cache_path, config, expected_rows=len(dataset), dataset_hash=fingerprint)
        if cached is not None and np.array_equal(cached.labels, dataset.label_array):
            return cached
        if cached is not None:
            logger.info(f"[CACHE] Etykiety w {cache_path} nie pasują do zbioru - ekstrakcja od nowa")

    vectors = [extract_feature(image, config) for image in dataset.images]
    table = FeatureTable(
        labels=dataset.label_array,
        features=stack_features(vectors),
        layout=vectors[0].layout,
        config=config,
        dataset_hash=fingerprint,
    )
    logger.info(f"[FEATURES] {len(vectors)} wektorów o długości {table.features.shape[1]} ({config.descriptor})")
    if cache_path is not None:
        write_feature_csv(cache_path, table)
    return table


# ============================================
# PROTOCOL RUNS
# ============================================

def classify_split(features: np.ndarray, labels: np.ndarray, split: Split,
                   config: PipelineConfig) -> np.ndarray:
    """Przewidywane etykiety dla części testowej podziału."""
    train, test = split
    if config.classifier == 'chi2_nn':
        gallery, gallery_labels = features[train], labels[train]
        return np.array([nn_classify(gallery, gallery_labels, features[i]) for i in test], dtype=np.int64)

    dictionary = build_dictionary(features[train], labels[train])
    params = SolverParams(lam=config.lam, max_iter=config.max_iter, tol=config.tol)
    return np.array([src_classify(dictionary, features[i], params).predicted for i in test], dtype=np.int64)


def split_accuracy(features: np.ndarray, labels: np.ndarray, split: Split,
                   config: PipelineConfig) -> float:
    predicted = classify_split(features, labels, split, config)
    truth = labels[split[1]]
    return float(np.mean(predicted == truth))


def run_protocol(dataset: LabeledDataset, protocol: Protocol, config: PipelineConfig,
                 cache_path: Optional[Path] = None,
                 table: Optional[FeatureTable] = None) -> EvalReport:
    """
    Wykonuje protokół i zwraca raport (accuracy per run, średnia, std, czasy faz).

    Args:
        dataset: zbiór etykietowany
        protocol: first_d albo random_split
        config: deskryptor + klasyfikator + parametry solvera
        cache_path: opcjonalny plik CSV cache cech
        table: gotowe cechy (np. współdzielone przez run_sweep)

    Raises:
        ValueError: d niewykonalne dla zbioru
    """
    _check_feasible(dataset, protocol.d)
    timing: Dict[str, float] = {}

    started = time.perf_counter()
    if table is None:
        table = extract_dataset_features(dataset, config, cache_path)
    timing['features'] = time.perf_counter() - started

    started = time.perf_counter()
    splits = protocol_splits(dataset, protocol)
    timing['splits'] = time.perf_counter() - started

    started = time.perf_counter()
    accuracies = []
    for run, split in enumerate(splits):
        accuracy = split_accuracy(table.features, table.labels, split, config)
        accuracies.append(accuracy)
        logger.info(
            f"[RUN] {protocol.kind.value} d={protocol.d} run {run + 1}/{len(splits)}: "
            f"{accuracy:.4f} ({split[0].size} train / {split[1].size} test)"
        )
    timing['classification'] = time.perf_counter() - started

    report = EvalReport.from_accuracies(accuracies, protocol, config, timing)
    logger.info(f"[RUN] {config.descriptor} + {config.classifier}: mean={report.mean:.4f} std={report.std:.4f}")
    return report


def run_sweep(dataset: LabeledDataset, d_values: Sequence[int], config: PipelineConfig,
              cache_path: Optional[Path] = None) -> List[EvalReport]:
    """
    Krzywa first_d: jeden raport dla każdego d (cechy liczone raz).

    Example:
        >>> reports = run_sweep(orl, range(1, 6), PipelineConfig())
        >>> [round(r.mean, 3) for r in reports]
    """
    d_values = list(d_values)
    if not d_values:
        raise ValueError("Lista wartości d nie może być pusta")
    for d in d_values:
        _check_feasible(dataset, d)

    table = extract_dataset_features(dataset, config, cache_path)
    return [
        run_protocol(dataset, Protocol(ProtocolKind.FIRST_D, d=d), config, table=table)
        for d in d_values
    ]
