"""
CLBPFACE - Complete LBP (CLBP)

Rozkład różnic lokalnych D_p = f_p - f_c na znak S_p i moduł M_p = |D_p|
oraz operatory:
- CLBP_S: bity t(S_p, 0) - identyczne z progowaniem LBP
- CLBP_M: bity t(M_p, c), c = średnia M_p po wszystkich pikselach wewnętrznych
- CLBP_C: t(f_c, c_g), c_g = średnia jasność całego obrazu (z brzegiem)

t(x, c) = 1 gdy x >= c; S_p(0) = +1.

Użycie:
    from descriptors.clbp import clbp_all

    maps = clbp_all(image, NeighborhoodSpec(8, 1.0, 'riu2'))
    print(maps.m_threshold, maps.c_threshold)
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from collectors.pgm_reader import GrayImage
from descriptors.lbp_core import (
    CodeMap,
    NeighborhoodSpec,
    apply_mapping,
    neighbor_differences,
    pack_bits,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClbpMaps:
    """Trzy mapy CLBP policzone z tych samych próbek sąsiadów."""
    s_map: CodeMap
    m_map: CodeMap
    c_map: CodeMap
    m_threshold: float
    c_threshold: float

    def __post_init__(self):
        shapes = {(m.width, m.height) for m in (self.s_map, self.m_map, self.c_map)}
        if len(shapes) != 1:
            raise ValueError(f"Mapy CLBP mają różne wymiary: {shapes}")
        if self.m_threshold < 0:
            raise ValueError(f"m_threshold musi być >= 0, jest {self.m_threshold}")


def clbp_decompose(center: float, neighbors: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rozkład znak/moduł różnic sąsiadów.

    Returns:
        (signs, magnitudes): signs w {+1, -1}, magnitudes >= 0,
        signs * magnitudes == neighbors - center dokładnie

    Example:
        >>> clbp_decompose(100, [120, 80, 100])
        (array([ 1, -1,  1]), array([20., 20.,  0.]))
    """
    neighbors = np.asarray(neighbors, dtype=np.float64)
    if neighbors.size == 0:
        raise ValueError("Lista sąsiadów nie może być pusta")
    diffs = neighbors - float(center)
    signs = np.where(diffs >= 0, 1, -1)
    return signs, np.abs(diffs)


# ============================================
# CODE MAPS
# ============================================

def _sign_map(diffs: np.ndarray, spec: NeighborhoodSpec) -> CodeMap:
    return apply_mapping(pack_bits(diffs >= 0), spec)


def _magnitude_map(diffs: np.ndarray, spec: NeighborhoodSpec) -> Tuple[CodeMap, float]:
    magnitudes = np.abs(diffs)
    threshold = float(magnitudes.mean())
    return apply_mapping(pack_bits(magnitudes >= threshold), spec), threshold


def _center_map(image: GrayImage, centers: np.ndarray) -> Tuple[CodeMap, float]:
    global_mean = float(image.as_float().mean())
    codes = (centers >= global_mean).astype(np.int64)
    return CodeMap(width=codes.shape[1], height=codes.shape[0], codes=codes, bins=2), global_mean


def clbp_s_map(image: GrayImage, spec: NeighborhoodSpec) -> CodeMap:
    """CLBP_S - bit 1 gdy D_p >= 0; to samo co lbp_map."""
    _, diffs = neighbor_differences(image, spec)
    return _sign_map(diffs, spec)


def clbp_m_map(image: GrayImage, spec: NeighborhoodSpec) -> Tuple[CodeMap, float]:
    """
    CLBP_M - dwa przejścia: średnia c ze wszystkich M_p, potem bity t(M_p, c).

    Returns:
        (mapa kodów, c)
    """
    _, diffs = neighbor_differences(image, spec)
    return _magnitude_map(diffs, spec)


def clbp_c_map(image: GrayImage, spec: NeighborhoodSpec) -> CodeMap:
    """CLBP_C - kod 1 gdy f_c >= średnia całego obrazu."""
    centers, _ = neighbor_differences(image, spec)
    return _center_map(image, centers)[0]


def clbp_all(image: GrayImage, spec: NeighborhoodSpec) -> ClbpMaps:
    """Wszystkie trzy mapy CLBP z jednego próbkowania sąsiadów."""
    centers, diffs = neighbor_differences(image, spec)
    s_map = _sign_map(diffs, spec)
    m_map, m_threshold = _magnitude_map(diffs, spec)
    c_map, c_threshold = _center_map(image, centers)
    return ClbpMaps(
        s_map=s_map,
        m_map=m_map,
        c_map=c_map,
        m_threshold=m_threshold,
        c_threshold=c_threshold,
    )
