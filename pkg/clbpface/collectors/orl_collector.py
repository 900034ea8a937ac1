"""
CLBPFACE - ORL Dataset Collector

Wczytuje bazę twarzy ORL (AT&T) w układzie katalogów:

    <root>/s1/1.pgm ... <root>/s40/10.pgm   (92x112, P5 PGM)

do etykietowanego zbioru `LabeledDataset`. Baza NIE jest dołączona do repo
(patrz utils.constants.ORL_DOWNLOAD_HINT); testy korzystają z collectors.synthetic.

Użycie:
    from collectors.orl_collector import load_orl

    dataset = load_orl('data/orl_faces')
    print(f"{len(dataset)} obrazów, {dataset.class_count} klas")
"""

import hashlib
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Sequence, Tuple

import numpy as np

from collectors.pgm_reader import GrayImage, PgmFormatError, read_pgm_file
from utils.constants import ORL_IMAGES_PER_SUBJECT, ORL_SUBJECTS

logger = logging.getLogger(__name__)

_SUBJECT_DIR = re.compile(r'^s(\d+)$')
_IMAGE_FILE = re.compile(r'^(\d+)\.pgm$', re.IGNORECASE)


class DatasetError(ValueError):
    """Błąd wczytywania zbioru; `path` wskazuje problematyczną ścieżkę."""

    def __init__(self, path, message: str):
        super().__init__(f"{path}: {message}")
        self.path = Path(path)


@dataclass(frozen=True)
class LabeledDataset:
    """
    Niezmienny zbiór obrazów z etykietami klas 0..class_count-1.

    Example:
        >>> ds = LabeledDataset(images=(img_a, img_b), labels=(0, 1), class_count=2)
        >>> ds.class_counts()
        {0: 1, 1: 1}
    """
    images: Tuple[GrayImage, ...]
    labels: Tuple[int, ...]
    class_count: int

    def __post_init__(self):
        object.__setattr__(self, 'images', tuple(self.images))
        object.__setattr__(self, 'labels', tuple(int(label) for label in self.labels))
        if len(self.images) != len(self.labels):
            raise ValueError(
                f"images ({len(self.images)}) i labels ({len(self.labels)}) mają różne długości"
            )
        if self.class_count < 1:
            raise ValueError(f"class_count musi być >= 1, jest {self.class_count}")
        bad = [label for label in self.labels if not 0 <= label < self.class_count]
        if bad:
            raise ValueError(f"Etykiety poza zakresem [0, {self.class_count}): {sorted(set(bad))}")
        missing = set(range(self.class_count)) - set(self.labels)
        if missing:
            raise ValueError(f"Klasy bez obrazów: {sorted(missing)}")

    def __len__(self) -> int:
        return len(self.images)

    @property
    def label_array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=np.int64)

    def class_counts(self) -> Dict[int, int]:
        """Liczba obrazów w każdej klasie."""
        counts = np.bincount(self.label_array, minlength=self.class_count)
        return {label: int(count) for label, count in enumerate(counts)}

    def indices_of(self, label: int) -> np.ndarray:
        """Indeksy obrazów danej klasy, w kolejności zbioru."""
        return np.flatnonzero(self.label_array == label)

    def fingerprint(self) -> str:
        """
        SHA-256 zawartości zbioru (wymiary i piksele każdego obrazu + etykiety).

        Identyfikuje dane w nagłówku cache cech: dwa zbiory o tym samym
        kształcie, ale innych obrazach, mają różne odciski.
        """
        digest = hashlib.sha256()
        for image, label in zip(self.images, self.labels):
            digest.update(f"{image.width}x{image.height}:{label};".encode('ascii'))
            digest.update(image.pixels.tobytes())
        return digest.hexdigest()

    def subset(self, indices: Sequence[int]) -> 'LabeledDataset':
        """Podzbiór (etykiety nie są przenumerowywane)."""
        indices = list(indices)
        return LabeledDataset(
            images=tuple(self.images[i] for i in indices),
            labels=tuple(self.labels[i] for i in indices),
            class_count=self.class_count,
        )


def _numbered_entries(directory: Path, pattern: re.Pattern, want_dir: bool):
    """Zwraca [(numer, ścieżka)] posortowane numerycznie."""
    entries = []
    for entry in directory.iterdir():
        match = pattern.match(entry.name)
        if match and entry.is_dir() == want_dir:
            entries.append((int(match.group(1)), entry))
    return sorted(entries)


def load_orl(root_path) -> LabeledDataset:
    """
    Wczytuje bazę ORL.

    Obrazy uporządkowane wg (podmiot rosnąco, numer obrazu rosnąco);
    etykieta = pozycja podmiotu na posortowanej liście (s1 -> 0, s2 -> 1, ...).

    Args:
        root_path: katalog zawierający s1..s40

    Returns:
        LabeledDataset

    Raises:
        DatasetError: brak katalogu, brak podmiotów, nieczytelny plik

    Example:
        >>> dataset = load_orl('data/orl_faces')
        >>> len(dataset), dataset.class_count
        (400, 40)
    """
    root = Path(root_path)
    if not root.is_dir():
        raise DatasetError(root, "katalog ORL nie istnieje")

    subjects = _numbered_entries(root, _SUBJECT_DIR, want_dir=True)
    if not subjects:
        raise DatasetError(root, "nie znaleziono podmiotów (katalogów s1..s40)")
    if len(subjects) != ORL_SUBJECTS:
        logger.warning(f"[ORL] Znaleziono {len(subjects)} podmiotów zamiast {ORL_SUBJECTS} w {root}")

    images, labels = [], []
    for label, (_, subject_dir) in enumerate(subjects):
        files = _numbered_entries(subject_dir, _IMAGE_FILE, want_dir=False)
        if not files:
            raise DatasetError(subject_dir, "brak plików <i>.pgm")
        if len(files) != ORL_IMAGES_PER_SUBJECT:
            logger.warning(f"[ORL] {subject_dir.name}: {len(files)} obrazów zamiast {ORL_IMAGES_PER_SUBJECT}")

        for _, image_path in files:
            try:
                images.append(read_pgm_file(image_path))
            except (OSError, PgmFormatError) as e:
                raise DatasetError(image_path, f"nie można wczytać obrazu: {e}") from e
            labels.append(label)

    logger.info(f"[ORL] Wczytano {len(images)} obrazów, {len(subjects)} klas z {root}")
    return LabeledDataset(images=tuple(images), labels=tuple(labels), class_count=len(subjects))
