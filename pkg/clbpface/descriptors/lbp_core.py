"""
CLBPFACE - LBP Core

Operator Local Binary Pattern:
- podstawowy kod 3x3 (próg względem piksela centralnego, s(x) = 1 gdy x >= 0)
- kołowe sąsiedztwo (P, R) z interpolacją dwuliniową
- mapowania kodów: raw, u2 (uniform), riu2 (rotation-invariant uniform)

Konwencja sąsiadów: p = 0 po prawej stronie centrum (kąt 0), dalej przeciwnie
do ruchu wskazówek zegara. Sąsiad p leży w (wiersz, kolumna) =
(y - R sin(2πp/P), x + R cos(2πp/P)). Brzeg obrazu (ceil(R) pikseli) jest obcinany.

Użycie:
    from descriptors.lbp_core import NeighborhoodSpec, lbp_map

    spec = NeighborhoodSpec(P=8, R=1.0, mapping='riu2')
    code_map = lbp_map(image, spec)
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Tuple

import numpy as np

from collectors.pgm_reader import GrayImage
from utils.constants import MAX_MAPPING_P

logger = logging.getLogger(__name__)

# Offsety bliższe liczbie całkowitej niż to są zaokrąglane (odczyt dokładny)
_SNAP_EPS = 1e-9


class Mapping(str, Enum):
    RAW = 'raw'
    U2 = 'u2'
    RIU2 = 'riu2'


class ImageTooSmallError(ValueError):
    """Obraz za mały, by zmieścić choć jeden piksel wewnętrzny."""


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Sąsiedztwo P punktów na okręgu o promieniu R oraz mapowanie kodów."""
    P: int = 8
    R: float = 1.0
    mapping: Mapping = Mapping.RIU2

    def __post_init__(self):
        object.__setattr__(self, 'mapping', Mapping(self.mapping))
        if self.P < 4:
            raise ValueError(f"P musi być >= 4, jest {self.P}")
        if self.R <= 0:
            raise ValueError(f"R musi być > 0, jest {self.R}")

    @property
    def border(self) -> int:
        return int(math.ceil(self.R))

    @property
    def bins(self) -> int:
        return bin_count(self.mapping, self.P)


@dataclass(frozen=True)
class CodeMap:
    """Kody wzorców dla obszaru wewnętrznego obrazu, tablica (height, width)."""
    width: int
    height: int
    codes: np.ndarray
    bins: int

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.int64)
        if codes.shape != (self.height, self.width):
            raise ValueError(f"Kształt kodów {codes.shape} != ({self.height}, {self.width})")
        if codes.size and (codes.min() < 0 or codes.max() >= self.bins):
            raise ValueError(f"Kody poza zakresem [0, {self.bins})")
        codes.setflags(write=False)
        object.__setattr__(self, 'codes', codes)


# ============================================
# MAPPINGS
# ============================================

def bin_count(mapping, P: int) -> int:
    """Liczba koszy histogramu dla mapowania."""
    mapping = Mapping(mapping)
    if mapping is Mapping.RAW:
        return 2 ** P
    if mapping is Mapping.U2:
        return P * (P - 1) + 3
    return P + 2


def uniformity(code: int, P: int) -> int:
    """
    Liczba przejść 0/1 w kołowym P-bitowym zapisie kodu.

    Example:
        >>> uniformity(0b00001111, 8)
        2
    """
    if not 0 <= code < 2 ** P:
        raise ValueError(f"Kod {code} poza zakresem [0, 2^{P})")
    rotated = (code >> 1) | ((code & 1) << (P - 1))
    return bin(code ^ rotated).count('1')


def _uniformity_table(P: int) -> np.ndarray:
    codes = np.arange(2 ** P, dtype=np.int64)
    rotated = (codes >> 1) | ((codes & 1) << (P - 1))
    diff = codes ^ rotated
    return np.array([bin(int(v)).count('1') for v in diff], dtype=np.int64)


def _popcount_table(P: int) -> np.ndarray:
    return np.array([bin(c).count('1') for c in range(2 ** P)], dtype=np.int64)


@lru_cache(maxsize=None)
def _mapping_table(mapping: Mapping, P: int) -> np.ndarray:
    if P > MAX_MAPPING_P:
        raise ValueError(f"P={P} za duże dla tablicy mapowania (max {MAX_MAPPING_P})")

    if mapping is Mapping.RAW:
        table = np.arange(2 ** P, dtype=np.int64)
    elif mapping is Mapping.U2:
        uniform = _uniformity_table(P) <= 2
        table = np.full(2 ** P, P * (P - 1) + 2, dtype=np.int64)
        # Wzorce uniform dostają kolejne kosze wg rosnącego kodu
        table[uniform] = np.arange(int(uniform.sum()), dtype=np.int64)
    else:
        uniform = _uniformity_table(P) <= 2
        table = np.where(uniform, _popcount_table(P), P + 1).astype(np.int64)

    table.setflags(write=False)
    return table


def build_mapping(spec: NeighborhoodSpec) -> np.ndarray:
    """
    Tablica: kod surowy (0..2^P-1) -> indeks kosza.

    riu2: uniform -> liczba jedynek (0..P), pozostałe -> P+1.
    u2: każdy uniform osobny kosz, pozostałe wspólny ostatni kosz.

    Example:
        >>> table = build_mapping(NeighborhoodSpec(8, 1.0, 'riu2'))
        >>> int(table[0b11111111]), int(table.max()) + 1
        (8, 10)
    """
    return _mapping_table(spec.mapping, spec.P)


# ============================================
# SAMPLING
# ============================================

def basic_lbp_code(window) -> int:
    """
    Podstawowy kod LBP dla bloku 3x3 (wiersze od góry).

    Kolejność sąsiadów jak w kołowym sąsiedztwie P=8, R=1:
    p0 prawy, p1 prawy-górny, p2 górny, ... , p7 prawy-dolny.
    """
    block = np.asarray(window, dtype=np.float64).reshape(3, 3)
    center = block[1, 1]
    neighbors = (block[1, 2], block[0, 2], block[0, 1], block[0, 0],
                 block[1, 0], block[2, 0], block[2, 1], block[2, 2])
    return sum(1 << p for p, value in enumerate(neighbors) if value - center >= 0)


def neighbor_offsets(spec: NeighborhoodSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Offsety sąsiadów (dy, dx) w pikselach; wartości prawie całkowite są
    zaokrąglane, więc sąsiedzi na osiach czytani są dokładnie.
    """
    angles = 2.0 * np.pi * np.arange(spec.P) / spec.P
    dy = -spec.R * np.sin(angles)
    dx = spec.R * np.cos(angles)
    for offsets in (dy, dx):
        nearest = np.rint(offsets)
        snap = np.abs(offsets - nearest) < _SNAP_EPS
        offsets[snap] = nearest[snap]
    return dy, dx


def _check_size(image: GrayImage, spec: NeighborhoodSpec):
    minimum = 2 * spec.border + 1
    if image.width < minimum or image.height < minimum:
        raise ImageTooSmallError(
            f"Obraz {image.width}x{image.height} za mały dla R={spec.R}: "
            f"minimum {minimum}x{minimum}"
        )


def _interpolated_differences(pixels: np.ndarray, y0: int, x0: int, h: int, w: int,
                              spec: NeighborhoodSpec) -> np.ndarray:
    """
    Różnice D_p = f_p - f_c dla bloku centrów [y0:y0+h, x0:x0+w], kształt (P, h, w).

    Interpolacja dwuliniowa liczona na różnicach względem centrum (forma lerp):
    dla obrazu stałego D_p = 0 dokładnie, a przesunięcie jasności o stałą
    daje bit w bit te same różnice.
    """
    center = pixels[y0:y0 + h, x0:x0 + w]
    dy, dx = neighbor_offsets(spec)
    diffs = np.empty((spec.P, h, w))

    def corner(r: int, c: int) -> np.ndarray:
        return pixels[r:r + h, c:c + w] - center

    for p in range(spec.P):
        fy, fx = math.floor(dy[p]), math.floor(dx[p])
        ty, tx = dy[p] - fy, dx[p] - fx
        r, c = y0 + fy, x0 + fx

        top = corner(r, c)
        if tx > 0:
            top = top + tx * (corner(r, c + 1) - top)
        if ty > 0:
            bottom = corner(r + 1, c)
            if tx > 0:
                bottom = bottom + tx * (corner(r + 1, c + 1) - bottom)
            top = top + ty * (bottom - top)
        diffs[p] = top
    return diffs


def sample_circular_neighbors(image: GrayImage, x: int, y: int, spec: NeighborhoodSpec) -> np.ndarray:
    """
    P próbek na okręgu wokół piksela (x = kolumna, y = wiersz).

    Pozycje całkowite zwracają dokładną wartość piksela, pozostałe są
    interpolowane dwuliniowo z czterech otaczających pikseli.

    Raises:
        ValueError: centrum bliżej brzegu niż ceil(R)
    """
    b = spec.border
    if not (b <= x < image.width - b and b <= y < image.height - b):
        raise ValueError(
            f"Centrum ({x}, {y}) poza obszarem wewnętrznym dla R={spec.R} "
            f"(obraz {image.width}x{image.height})"
        )
    pixels = image.as_float()
    diffs = _interpolated_differences(pixels, y, x, 1, 1, spec)
    return pixels[y, x] + diffs[:, 0, 0]


def neighbor_differences(image: GrayImage, spec: NeighborhoodSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Wektorowo dla całego obszaru wewnętrznego.

    Returns:
        centers: (h', w') intensywności pikseli centralnych
        diffs: (P, h', w') różnice D_p = f_p - f_c

    Raises:
        ImageTooSmallError: obraz mniejszy niż 2*ceil(R)+1
    """
    _check_size(image, spec)
    b = spec.border
    pixels = image.as_float()
    h, w = image.height - 2 * b, image.width - 2 * b
    diffs = _interpolated_differences(pixels, b, b, h, w, spec)
    return pixels[b:b + h, b:b + w], diffs


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Składa bity (P, ...) w kody sum bit_p * 2^p."""
    weights = (1 << np.arange(bits.shape[0], dtype=np.int64)).reshape((-1,) + (1,) * (bits.ndim - 1))
    return (bits.astype(np.int64) * weights).sum(axis=0)


def apply_mapping(raw_codes: np.ndarray, spec: NeighborhoodSpec) -> CodeMap:
    """Mapuje surowe kody i pakuje w CodeMap."""
    codes = build_mapping(spec)[raw_codes]
    return CodeMap(width=codes.shape[1], height=codes.shape[0], codes=codes, bins=spec.bins)


def lbp_map(image: GrayImage, spec: NeighborhoodSpec) -> CodeMap:
    """
    Mapa kodów LBP_{P,R} z wybranym mapowaniem.

    Raises:
        ImageTooSmallError: obraz mniejszy niż 2*ceil(R)+1 w którymś wymiarze

    Example:
        >>> flat = GrayImage.from_array(np.full((10, 10), 7))
        >>> lbp_map(flat, NeighborhoodSpec(8, 1.0, 'raw')).codes[0, 0]
        255
    """
    _, diffs = neighbor_differences(image, spec)
    raw = pack_bits(diffs >= 0)
    return apply_mapping(raw, spec)

