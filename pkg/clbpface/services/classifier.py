"""
CLBPFACE - Classifiers

Dwa klasyfikatory dla wektorów cech:
- chi2_nn: najbliższy sąsiad w odległości chi-kwadrat (bazowy LBP)
- src: klasyfikator reprezentacji rzadkiej - słownik z kolumn treningowych
  o normie 1, rozwiązanie lasso dla próbki, residuum rekonstrukcji tylko
  z kolumn danej klasy, decyzja = klasa o najmniejszym residuum

Remisy zawsze rozstrzygane na korzyść najniższego indeksu (galerii / klasy).

Użycie:
    from services.classifier import build_dictionary, src_classify

    dictionary = build_dictionary(train_features, train_labels)
    result = src_classify(dictionary, probe, SolverParams(lam=0.01))
    print(result.predicted, result.residuals)
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Sequence

import numpy as np

from services.l1_solver import SolverParams, SparseSolution, estimate_lipschitz, solve_l1

logger = logging.getLogger(__name__)

# Tolerancja normy kolumn słownika
UNIT_NORM_TOLERANCE = 1e-9


# ============================================
# CHI-SQUARE NEAREST NEIGHBOR
# ============================================

def chi_square(x, y) -> float:
    """
    Odległość chi-kwadrat: suma (x_i - y_i)^2 / (x_i + y_i); składniki 0/0 = 0.

    Example:
        >>> chi_square([1, 0], [0, 1])
        2.0
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"Wektory mają różne długości: {x.shape} vs {y.shape}")
    if np.any(x < 0) or np.any(y < 0):
        raise ValueError("Odległość chi-kwadrat wymaga nieujemnych wartości")
    total = x + y
    support = total > 0
    return float(((x[support] - y[support]) ** 2 / total[support]).sum())


def chi_square_to_gallery(gallery: np.ndarray, probe: np.ndarray) -> np.ndarray:
    """Odległości chi-kwadrat próbki do każdego wiersza galerii (n,)."""
    total = gallery + probe
    diff_sq = (gallery - probe) ** 2
    terms = np.divide(diff_sq, total, out=np.zeros_like(total), where=total > 0)
    return terms.sum(axis=1)


def nn_classify(gallery_features, gallery_labels: Sequence[int], probe,
                distance: Callable = chi_square) -> int:
    """
    Etykieta najbliższego wektora galerii; remis -> najniższy indeks galerii.

    Args:
        gallery_features: macierz (n, m) lub lista wektorów
        gallery_labels: n etykiet
        probe: wektor m
        distance: funkcja odległości (domyślnie chi-kwadrat, liczona wektorowo)

    Raises:
        ValueError: pusta galeria, niezgodne wymiary
    """
    gallery = np.asarray(gallery_features, dtype=np.float64)
    labels = np.asarray(gallery_labels, dtype=np.int64)
    probe = np.asarray(probe, dtype=np.float64)
    if gallery.size == 0 or labels.size == 0:
        raise ValueError("Galeria nie może być pusta")
    if gallery.ndim != 2 or gallery.shape[0] != labels.size:
        raise ValueError(f"Galeria {gallery.shape} nie pasuje do {labels.size} etykiet")
    if gallery.shape[1] != probe.size:
        raise ValueError(f"Próbka ma długość {probe.size}, galeria {gallery.shape[1]}")

    if distance is chi_square:
        if np.any(gallery < 0) or np.any(probe < 0):
            raise ValueError("Odległość chi-kwadrat wymaga nieujemnych wartości")
        distances = chi_square_to_gallery(gallery, probe)
    else:
        distances = np.array([distance(row, probe) for row in gallery])
    # argmin zwraca pierwsze minimum
    return int(labels[int(np.argmin(distances))])


# ============================================
# SPARSE REPRESENTATION CLASSIFIER
# ============================================

@dataclass(frozen=True)
class Dictionary:
    """
    Słownik SRC: kolumny (m x n) o normie 1 uporządkowane wg (klasa, próbka).

    gram (A^T A) i lipschitz liczone raz przy konstrukcji - współdzielone
    przez wszystkie próbki testowe.
    """
    columns: np.ndarray
    labels: np.ndarray
    column_norms: np.ndarray
    classes: np.ndarray = field(init=False, repr=False)
    gram: np.ndarray = field(init=False, repr=False)
    lipschitz: float = field(init=False, repr=False)

    def __post_init__(self):
        columns = np.array(self.columns, dtype=np.float64)
        labels = np.array(self.labels, dtype=np.int64)
        norms = np.array(self.column_norms, dtype=np.float64)
        if columns.ndim != 2 or columns.shape[1] != labels.size or norms.size != labels.size:
            raise ValueError(
                f"Niespójny słownik: kolumny {columns.shape}, etykiety {labels.size}, normy {norms.size}"
            )
        unit = np.linalg.norm(columns, axis=0)
        if np.any(np.abs(unit - 1.0) > UNIT_NORM_TOLERANCE):
            raise ValueError("Kolumny słownika muszą mieć normę 1")

        for array in (columns, labels, norms):
            array.setflags(write=False)
        gram = columns.T @ columns
        gram.setflags(write=False)
        classes = np.unique(labels)
        classes.setflags(write=False)

        object.__setattr__(self, 'columns', columns)
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'column_norms', norms)
        object.__setattr__(self, 'classes', classes)
        object.__setattr__(self, 'gram', gram)
        object.__setattr__(self, 'lipschitz', estimate_lipschitz(columns))

    @property
    def dimension(self) -> int:
        return self.columns.shape[0]

    @property
    def size(self) -> int:
        return self.columns.shape[1]


@dataclass(frozen=True)
class SrcResult:
    """Decyzja SRC z residuami (wyrównanymi z `classes`) i diagnostyką solvera."""
    predicted: int
    classes: np.ndarray
    residuals: np.ndarray
    solution: SparseSolution
    sci: float

    def residual_map(self) -> Dict[int, float]:
        return {int(c): float(r) for c, r in zip(self.classes, self.residuals)}


def build_dictionary(features, labels: Sequence[int]) -> Dictionary:
    """
    Buduje słownik z wektorów treningowych (wiersz = próbka).

    Kolumny porządkowane stabilnie wg klasy, potem wg kolejności próbek;
    każda dzielona przez swoją normę euklidesową (norma zapamiętana).

    Raises:
        ValueError: wektor zerowy, niespójne długości, pusty zbiór

    Example:
        >>> d = build_dictionary([[3.0, 4.0]], [0])
        >>> d.columns[:, 0], d.column_norms[0]
        (array([0.6, 0.8]), 5.0)
    """
    try:
        matrix = np.array([np.asarray(row, dtype=np.float64) for row in features], dtype=np.float64)
    except ValueError as e:
        raise ValueError(f"Wektory cech mają niespójne długości: {e}")
    labels = np.asarray(labels, dtype=np.int64)
    if matrix.ndim != 2 or matrix.shape[0] == 0:
        raise ValueError(f"Oczekiwano niepustej macierzy (n, m), jest {matrix.shape}")
    if matrix.shape[0] != labels.size:
        raise ValueError(f"{matrix.shape[0]} wektorów, {labels.size} etykiet")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("Wektory cech muszą być skończone")

    order = np.argsort(labels, kind='stable')
    matrix, labels = matrix[order], labels[order]
    norms = np.linalg.norm(matrix, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ValueError(f"Wektor zerowy nie może być kolumną słownika (pozycje {zero.tolist()})")

    columns = (matrix / norms[:, None]).T
    logger.debug(f"[SRC] Słownik {columns.shape[0]}x{columns.shape[1]}, {np.unique(labels).size} klas")
    return Dictionary(columns=columns, labels=labels, column_norms=norms)


def class_residuals(dictionary: Dictionary, alpha, y) -> np.ndarray:
    """
    Residua ||y - A delta_i(alpha)|| dla każdej klasy (kolejność dictionary.classes).

    delta_i zeruje współczynniki spoza klasy i.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if alpha.size != dictionary.size:
        raise ValueError(f"alpha ma {alpha.size} współczynników, słownik {dictionary.size} kolumn")
    if y.size != dictionary.dimension:
        raise ValueError(f"y ma długość {y.size}, słownik {dictionary.dimension}")

    residuals = np.empty(dictionary.classes.size)
    for index, label in enumerate(dictionary.classes):
        mask = dictionary.labels == label
        reconstruction = dictionary.columns[:, mask] @ alpha[mask]
        residuals[index] = np.linalg.norm(y - reconstruction)
    return residuals


def sparsity_concentration(dictionary: Dictionary, alpha) -> float:
    """
    SCI = (C * max_i ||delta_i(alpha)||_1 / ||alpha||_1 - 1) / (C - 1), w [0, 1].

    Tylko diagnostyka; 1.0 dla słownika jednoklasowego, 0.0 dla alpha = 0.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    count = dictionary.classes.size
    total = float(np.abs(alpha).sum())
    if count == 1:
        return 1.0
    if total == 0.0:
        return 0.0
    per_class = [float(np.abs(alpha[dictionary.labels == c]).sum()) for c in dictionary.classes]
    return (count * max(per_class) / total - 1.0) / (count - 1)


def src_classify(dictionary: Dictionary, probe, params: SolverParams = SolverParams()) -> SrcResult:
    """
    Klasyfikuje próbkę: normalizacja do normy 1, lasso, residua klas, argmin.

    Raises:
        ValueError: próbka zerowa lub o złej długości
        SolverInputError: wartości nieskończone
    """
    probe = np.asarray(probe, dtype=np.float64)
    if probe.ndim != 1 or probe.size != dictionary.dimension:
        raise ValueError(f"Próbka ma kształt {probe.shape}, słownik wymaga ({dictionary.dimension},)")
    norm = float(np.linalg.norm(probe))
    if norm == 0.0:
        raise ValueError("Próbka zerowa nie może być znormalizowana")
    y = probe / norm

    solution = solve_l1(dictionary.columns, y, params,
                        gram=dictionary.gram, lipschitz=dictionary.lipschitz)
    residuals = class_residuals(dictionary, solution.coefficients, y)
    # argmin zwraca pierwszą (najniższą) klasę przy remisie
    predicted = int(dictionary.classes[int(np.argmin(residuals))])

    return SrcResult(
        predicted=predicted,
        classes=dictionary.classes,
        residuals=residuals,
        solution=solution,
        sci=sparsity_concentration(dictionary, solution.coefficients),
    )
