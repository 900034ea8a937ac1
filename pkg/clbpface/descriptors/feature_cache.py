"""
CLBPFACE - Feature Cache (CSV)

Cache wektorów cech na dysku:
- linia 1: nagłówek JSON poprzedzony '#': układ segmentów, hash konfiguracji
  deskryptora, echo konfiguracji, odcisk zbioru obrazów
- kolejne linie: etykieta, potem wartości w kolejności układu

Zmiana konfiguracji deskryptora (inny hash) albo innego zbioru (inny odcisk)
unieważnia cache.

Użycie:
    from descriptors.feature_cache import FeatureTable, write_feature_csv, load_cached

    table = load_cached(path, config, dataset_hash=dataset.fingerprint())
    if table is None:
        ...  # ekstrakcja od nowa
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from descriptors.features import LayoutSegment
from utils.config import PipelineConfig

logger = logging.getLogger(__name__)

HEADER_PREFIX = '# '
# 17 cyfr znaczących - float64 odczytany z CSV jest bit w bit ten sam
FLOAT_FORMAT = '%.17g'


@dataclass(frozen=True)
class FeatureTable:
    """Macierz cech (wiersz = obraz) z etykietami i układem segmentów."""
    labels: np.ndarray
    features: np.ndarray
    layout: Tuple[LayoutSegment, ...]
    config: PipelineConfig
    dataset_hash: Optional[str] = None

    def __post_init__(self):
        if self.features.ndim != 2 or self.features.shape[0] != self.labels.size:
            raise ValueError(
                f"features {self.features.shape} nie pasuje do {self.labels.size} etykiet"
            )


def write_feature_csv(path, table: FeatureTable) -> Path:
    """Zapisuje tablicę cech (nagłówek JSON + wiersze CSV)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        'config_hash': table.config.descriptor_hash(),
        'config': table.config.to_dict(),
        'layout': [segment.to_dict() for segment in table.layout],
        'dataset_hash': table.dataset_hash,
    }
    frame = pd.DataFrame(table.features)
    frame.insert(0, 'label', table.labels.astype(np.int64))

    with path.open('w', encoding='utf-8', newline='') as handle:
        handle.write(HEADER_PREFIX + json.dumps(header, sort_keys=True) + '\n')
        frame.to_csv(handle, header=False, index=False, float_format=FLOAT_FORMAT)

    logger.info(f"[CACHE] Zapisano {len(frame)} wektorów cech do {path}")
    return path


def read_feature_csv(path) -> FeatureTable:
    """
    Wczytuje tablicę cech.

    Raises:
        ValueError: brak/uszkodzony nagłówek JSON (także brakujące klucze)
    """
    path = Path(path)
    with path.open('r', encoding='utf-8') as handle:
        first = handle.readline()
    if not first.startswith(HEADER_PREFIX):
        raise ValueError(f"{path}: brak nagłówka JSON cech")
    try:
        header = json.loads(first[len(HEADER_PREFIX):])
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: uszkodzony nagłówek JSON: {e}")

    frame = pd.read_csv(path, header=None, skiprows=1, dtype=np.float64,
                        float_precision='round_trip')
    labels = frame.iloc[:, 0].to_numpy().astype(np.int64)
    features = frame.iloc[:, 1:].to_numpy(dtype=np.float64)
    try:
        layout = tuple(LayoutSegment.from_dict(item) for item in header['layout'])
        config = PipelineConfig.from_dict(header['config'])
        dataset_hash = header.get('dataset_hash')
    except (KeyError, TypeError, AttributeError, ValueError) as e:
        raise ValueError(f"{path}: niekompletny nagłówek cech: {e!r}")

    if layout and layout[-1].stop != features.shape[1]:
        raise ValueError(f"{path}: układ ({layout[-1].stop}) != liczba kolumn ({features.shape[1]})")
    return FeatureTable(labels=labels, features=features, layout=layout, config=config,
                        dataset_hash=dataset_hash)


def load_cached(path, config: PipelineConfig, expected_rows: Optional[int] = None,
                dataset_hash: Optional[str] = None) -> Optional[FeatureTable]:
    """
    Zwraca cache, jeśli istnieje i pasuje do konfiguracji deskryptora; inaczej None.

    Gdy podano dataset_hash, cache musi pochodzić z tego samego zbioru obrazów
    (cache bez odcisku jest wtedy odrzucany).
    """
    path = Path(path)
    if not path.exists():
        return None
    try:
        table = read_feature_csv(path)
    except (ValueError, KeyError, OSError) as e:
        logger.warning(f"[CACHE] Pomijam uszkodzony cache {path}: {e}")
        return None

    if table.config.descriptor_hash() != config.descriptor_hash():
        logger.info(f"[CACHE] Konfiguracja deskryptora zmieniona - unieważniam {path}")
        return None
    if expected_rows is not None and table.labels.size != expected_rows:
        logger.info(f"[CACHE] Inna liczba obrazów ({table.labels.size} != {expected_rows}) - unieważniam {path}")
        return None
    if dataset_hash is not None and table.dataset_hash != dataset_hash:
        logger.info(f"[CACHE] Cache pochodzi z innego zbioru obrazów - unieważniam {path}")
        return None

    logger.info(f"[CACHE] Używam cache cech {path}")
    return table


def stack_features(vectors: Sequence) -> np.ndarray:
    """Lista FeatureVector -> macierz (n, m)."""
    return np.vstack([vector.values for vector in vectors])
