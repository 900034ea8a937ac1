"""
CLBPFACE - Pyramid Features

Histogramy regionalne z map kodów i wielorozdzielczy wektor cech CLBP_S_M:
dla każdego poziomu siatki (np. 1x1, 2x2, 4x4) i każdego regionu
(wierszami) dokładany jest histogram CLBP_S, potem CLBP_M (opcjonalnie CLBP_C),
każdy osobno znormalizowany do sumy 1.

Regiony liczone są we współrzędnych mapy kodów (po obcięciu brzegu); reszta
z dzielenia trafia do ostatniego wiersza/kolumny regionów.

Użycie:
    from descriptors.features import GridSpec, pyramid_feature

    grid = GridSpec(levels=((1, 1), (2, 2), (4, 4)))
    feature = pyramid_feature(image, spec, grid, include_c=False)
    print(len(feature.values), len(feature.layout))
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from collectors.pgm_reader import GrayImage
from descriptors.clbp import clbp_all
from descriptors.lbp_core import CodeMap, NeighborhoodSpec, lbp_map
from utils.config import PipelineConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridSpec:
    """Poziomy piramidy: sekwencja (rows, cols)."""
    levels: Tuple[Tuple[int, int], ...] = ((1, 1), (2, 2), (4, 4))

    def __post_init__(self):
        levels = tuple((int(r), int(c)) for r, c in self.levels)
        if not levels:
            raise ValueError("Siatka musi mieć co najmniej jeden poziom")
        if any(r < 1 or c < 1 for r, c in levels):
            raise ValueError(f"Wymiary poziomów muszą być >= 1: {levels}")
        object.__setattr__(self, 'levels', levels)

    @property
    def region_count(self) -> int:
        return sum(r * c for r, c in self.levels)


@dataclass(frozen=True)
class Region:
    """Prostokąt w układzie mapy kodów."""
    top: int
    left: int
    height: int
    width: int

    @property
    def area(self) -> int:
        return self.height * self.width


@dataclass(frozen=True)
class Histogram:
    bins: np.ndarray
    normalized: bool = False

    def normalize(self) -> 'Histogram':
        """Kopia o sumie 1 (pusty region zostaje zerowy)."""
        total = self.bins.sum()
        values = self.bins / total if total > 0 else np.zeros_like(self.bins, dtype=np.float64)
        return Histogram(bins=values.astype(np.float64), normalized=True)


@dataclass(frozen=True)
class LayoutSegment:
    """Fragment wektora cech: [start, stop) dla (poziom, region, operator)."""
    level: int
    grid: Tuple[int, int]
    region: int
    operator: str
    start: int
    stop: int
    pixel_count: int

    def to_dict(self) -> dict:
        return {
            'level': self.level, 'grid': list(self.grid), 'region': self.region,
            'operator': self.operator, 'start': self.start, 'stop': self.stop,
            'pixel_count': self.pixel_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'LayoutSegment':
        return cls(**dict(data, grid=tuple(data['grid'])))


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    layout: Tuple[LayoutSegment, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        layout = tuple(self.layout)
        position = 0
        for segment in layout:
            if segment.start != position or segment.stop <= segment.start:
                raise ValueError(f"Segmenty układu nie pokrywają wektora: {segment}")
            position = segment.stop
        if position != values.size:
            raise ValueError(f"Układ pokrywa {position} wartości, wektor ma {values.size}")
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'layout', layout)

    def __len__(self) -> int:
        return self.values.size

    def segment_values(self, segment: LayoutSegment) -> np.ndarray:
        return self.values[segment.start:segment.stop]


# ============================================
# REGIONS & HISTOGRAMS
# ============================================

def _split(length: int, parts: int) -> List[Tuple[int, int]]:
    """(start, size) dla podziału na parts części; reszta w ostatniej."""
    base = length // parts
    spans = [(i * base, base) for i in range(parts - 1)]
    spans.append(((parts - 1) * base, length - (parts - 1) * base))
    return spans


def grid_regions(map_width: int, map_height: int, rows: int, cols: int) -> List[Region]:
    """
    Dzieli mapę na rows x cols regionów (kolejność wierszami).

    Example:
        >>> [(r.height, r.width) for r in grid_regions(11, 11, 2, 2)]
        [(5, 5), (5, 6), (6, 5), (6, 6)]
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"Siatka musi mieć rows, cols >= 1, jest {rows}x{cols}")
    if rows > map_height or cols > map_width:
        raise ValueError(
            f"Siatka {rows}x{cols} większa niż mapa {map_width}x{map_height}"
        )
    return [
        Region(top=top, left=left, height=height, width=width)
        for top, height in _split(map_height, rows)
        for left, width in _split(map_width, cols)
    ]


def region_histogram(code_map: CodeMap, region: Region, bin_count: int) -> Histogram:
    """
    Surowy histogram kodów w regionie.

    Raises:
        ValueError: region poza mapą lub kod >= bin_count
    """
    if (region.top < 0 or region.left < 0 or region.height < 0 or region.width < 0
            or region.top + region.height > code_map.height
            or region.left + region.width > code_map.width):
        raise ValueError(f"Region {region} poza mapą {code_map.width}x{code_map.height}")

    codes = code_map.codes[region.top:region.top + region.height,
                           region.left:region.left + region.width].ravel()
    if codes.size and codes.max() >= bin_count:
        raise ValueError(f"Kod {int(codes.max())} >= bin_count {bin_count}")
    return Histogram(bins=np.bincount(codes, minlength=bin_count).astype(np.float64))


# ============================================
# FEATURE VECTORS
# ============================================

def _assemble(named_maps: Sequence[Tuple[str, CodeMap]], grid: GridSpec) -> FeatureVector:
    """Histogramy per (poziom, region, operator), każdy znormalizowany."""
    reference = named_maps[0][1]
    values, layout = [], []
    position = 0
    for level, (rows, cols) in enumerate(grid.levels):
        regions = grid_regions(reference.width, reference.height, rows, cols)
        for index, region in enumerate(regions):
            for operator, code_map in named_maps:
                hist = region_histogram(code_map, region, code_map.bins).normalize()
                stop = position + hist.bins.size
                layout.append(LayoutSegment(
                    level=level, grid=(rows, cols), region=index, operator=operator,
                    start=position, stop=stop, pixel_count=region.area,
                ))
                values.append(hist.bins)
                position = stop
    return FeatureVector(values=np.concatenate(values), layout=tuple(layout))


def pyramid_feature(image: GrayImage, spec: NeighborhoodSpec, grid: GridSpec,
                    include_c: bool = False) -> FeatureVector:
    """
    Wielorozdzielczy deskryptor CLBP_S_M (opcjonalnie z CLBP_C).

    Długość = suma po poziomach rows*cols*(bins_S + bins_M [+ 2]).
    """
    maps = clbp_all(image, spec)
    named = [('S', maps.s_map), ('M', maps.m_map)]
    if include_c:
        named.append(('C', maps.c_map))
    return _assemble(named, grid)


def lbp_pyramid_feature(image: GrayImage, spec: NeighborhoodSpec, grid: GridSpec) -> FeatureVector:
    """Bazowy histogram LBP "wzbogacony przestrzennie" (bez części M)."""
    return _assemble([('LBP', lbp_map(image, spec))], grid)


def extract_feature(image: GrayImage, config: PipelineConfig) -> FeatureVector:
    """Wybiera deskryptor wg konfiguracji pipeline'u."""
    spec = NeighborhoodSpec(P=config.P, R=config.R, mapping=config.mapping)
    grid = GridSpec(levels=config.grid)
    if config.descriptor == 'lbp':
        return lbp_pyramid_feature(image, spec, grid)
    return pyramid_feature(image, spec, grid, include_c=config.include_c)
