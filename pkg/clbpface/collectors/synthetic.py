"""
CLBPFACE - Synthetic Dataset Generator

Generuje deterministyczny, etykietowany zbiór tekstur do testów bez bazy ORL.
Każda klasa to zorientowana sinusoidalna kratka (własny okres, kąt i faza),
każdy obraz dostaje dodatkowo szum gaussowski - klasy są rozdzielne dla
deskryptorów tekstury.

Użycie:
    from collectors.synthetic import synth_dataset

    dataset = synth_dataset(class_count=4, per_class=10, side=32, seed=7)
"""

import logging
from pathlib import Path

import numpy as np

from collectors.orl_collector import LabeledDataset
from collectors.pgm_reader import GrayImage, write_pgm_file

logger = logging.getLogger(__name__)

# Parametry tekstury
GRATING_MEAN = 128.0
GRATING_AMPLITUDE = 90.0
NOISE_SIGMA = 4.0
MIN_PERIOD = 3.0


def _class_gratings(class_count: int, side: int, rng: np.random.Generator) -> np.ndarray:
    """Bazowe tekstury klas, kształt (class_count, side, side)."""
    max_period = max(2.0 * MIN_PERIOD, side / 4.0)
    periods = np.geomspace(MIN_PERIOD, max_period, class_count)
    angles = np.pi * np.arange(class_count) / class_count
    phases = rng.uniform(0.0, 2.0 * np.pi, size=class_count)

    y, x = np.mgrid[0:side, 0:side].astype(np.float64)
    bases = np.empty((class_count, side, side))
    for k in range(class_count):
        u = x * np.cos(angles[k]) + y * np.sin(angles[k])
        bases[k] = GRATING_MEAN + GRATING_AMPLITUDE * np.sin(2.0 * np.pi * u / periods[k] + phases[k])
    return bases


def synth_dataset(class_count: int, per_class: int, side: int, seed: int) -> LabeledDataset:
    """
    Tworzy syntetyczny zbiór: class_count klas po per_class obrazów side x side.

    Wynik jest identyczny (bajt w bajt) dla tych samych argumentów.

    Args:
        class_count: liczba klas (>= 2)
        per_class: obrazów na klasę (>= 2)
        side: bok obrazu w pikselach (>= 16)
        seed: ziarno generatora

    Example:
        >>> ds = synth_dataset(4, 6, 32, 7)
        >>> len(ds), ds.class_count
        (24, 4)
    """
    if class_count < 2:
        raise ValueError(f"class_count musi być >= 2, jest {class_count}")
    if per_class < 2:
        raise ValueError(f"per_class musi być >= 2, jest {per_class}")
    if side < 16:
        raise ValueError(f"side musi być >= 16, jest {side}")

    rng = np.random.default_rng(seed)
    bases = _class_gratings(class_count, side, rng)

    images, labels = [], []
    for label in range(class_count):
        for _ in range(per_class):
            noisy = bases[label] + rng.normal(0.0, NOISE_SIGMA, size=(side, side))
            pixels = np.clip(np.rint(noisy), 0, 255).astype(np.uint8)
            images.append(GrayImage.from_array(pixels))
            labels.append(label)

    logger.debug(f"[SYNTH] {class_count} klas x {per_class} obrazów, side={side}, seed={seed}")
    return LabeledDataset(images=tuple(images), labels=tuple(labels), class_count=class_count)


def export_orl_layout(dataset: LabeledDataset, root) -> Path:
    """
    Zapisuje zbiór w układzie ORL (<root>/s<k>/<i>.pgm), np. do testów CLI.
    """
    root = Path(root)
    counters = {}
    for image, label in zip(dataset.images, dataset.labels):
        counters[label] = counters.get(label, 0) + 1
        write_pgm_file(root / f"s{label + 1}" / f"{counters[label]}.pgm", image)
    logger.info(f"[SYNTH] Zapisano {len(dataset)} obrazów do {root}")
    return root
