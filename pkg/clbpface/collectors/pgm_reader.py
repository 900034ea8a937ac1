"""
CLBPFACE - PGM Reader/Writer

Czyta i zapisuje obrazy w skali szarości w formacie binarnym PGM (P5),
w którym dystrybuowana jest baza ORL.

Nagłówek: `P5 <width> <height> <maxval>`, tokeny rozdzielone białymi znakami,
komentarze `#` do końca linii dozwolone między tokenami, dokładnie jeden biały
znak przed danymi pikseli (width*height bajtów, maxval <= 255).

Użycie:
    from collectors.pgm_reader import load_pgm, read_pgm_file, encode_pgm

    image = read_pgm_file('orl_faces/s1/1.pgm')
    print(image.width, image.height)
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np

logger = logging.getLogger(__name__)

_WHITESPACE = b' \t\n\r\v\f'


class PgmFormatError(ValueError):
    """Błąd parsowania PGM; `field` wskazuje pole nagłówka (magic/width/height/maxval/payload)."""

    def __init__(self, field: str, message: str):
        super().__init__(f"PGM {field}: {message}")
        self.field = field
        self.detail = message


@dataclass(frozen=True)
class GrayImage:
    """
    Obraz w skali szarości.

    `pixels` to tablica uint8 o kształcie (height, width), wierszami (row-major),
    czyli pixel (i, j) = pixels[j, i].
    """
    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"Obraz musi mieć wymiary >= 1, jest {self.width}x{self.height}")
        pixels = np.asarray(self.pixels)
        if pixels.size != self.width * self.height:
            raise ValueError(
                f"Liczba pikseli {pixels.size} != width*height = {self.width * self.height}"
            )
        if pixels.size and (pixels.min() < 0 or pixels.max() > 255):
            raise ValueError("Intensywności muszą być w zakresie [0, 255]")
        pixels = pixels.astype(np.uint8).reshape(self.height, self.width)
        pixels.setflags(write=False)
        object.__setattr__(self, 'pixels', pixels)

    @classmethod
    def from_array(cls, array) -> 'GrayImage':
        """Tworzy obraz z tablicy 2-D (height, width)."""
        array = np.asarray(array)
        if array.ndim != 2:
            raise ValueError(f"Oczekiwano tablicy 2-D, jest {array.ndim}-D")
        return cls(width=array.shape[1], height=array.shape[0], pixels=array)

    def as_float(self) -> np.ndarray:
        """Intensywności jako float64 - różnice liczone są na liczbach rzeczywistych."""
        return self.pixels.astype(np.float64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return (self.width == other.width and self.height == other.height
                and np.array_equal(self.pixels, other.pixels))


# ============================================
# PARSING
# ============================================

def _next_token(data: bytes, pos: int, field: str) -> Tuple[bytes, int]:
    """Zwraca kolejny token nagłówka, pomijając białe znaki i komentarze."""
    n = len(data)
    while pos < n:
        byte = data[pos:pos + 1]
        if byte in _WHITESPACE and byte:
            pos += 1
        elif byte == b'#':
            end = data.find(b'\n', pos)
            pos = n if end < 0 else end + 1
        else:
            break
    start = pos
    while pos < n and data[pos:pos + 1] not in _WHITESPACE and data[pos:pos + 1] != b'#':
        pos += 1
    if start == pos:
        raise PgmFormatError(field, "brak wartości (nagłówek ucięty)")
    return data[start:pos], pos


def _parse_positive(token: bytes, field: str) -> int:
    try:
        value = int(token.decode('ascii'))
    except (UnicodeDecodeError, ValueError):
        raise PgmFormatError(field, f"niepoprawna liczba {token!r}")
    if value < 1:
        raise PgmFormatError(field, f"musi być >= 1, jest {value}")
    return value


def load_pgm(data: bytes) -> GrayImage:
    """
    Parsuje zawartość pliku P5 PGM.

    Args:
        data: surowe bajty pliku

    Returns:
        GrayImage o wymiarach z nagłówka

    Raises:
        PgmFormatError: zły magic, maxval > 255, ucięte dane pikseli itd.

    Example:
        >>> img = load_pgm(b"P5\\n2 2\\n255\\n" + bytes([0, 128, 255, 7]))
        >>> img.pixels.tolist()
        [[0, 128], [255, 7]]
    """
    magic, pos = _next_token(data, 0, 'magic')
    if magic != b'P5':
        raise PgmFormatError('magic', f"nieobsługiwany format {magic[:8]!r} (tylko P5)")

    token, pos = _next_token(data, pos, 'width')
    width = _parse_positive(token, 'width')
    token, pos = _next_token(data, pos, 'height')
    height = _parse_positive(token, 'height')
    token, pos = _next_token(data, pos, 'maxval')
    maxval = _parse_positive(token, 'maxval')
    if maxval > 255:
        raise PgmFormatError('maxval', f"{maxval} > 255 (16-bitowe PGM nie są obsługiwane)")

    # Dokładnie jeden biały znak przed danymi
    if pos >= len(data) or data[pos:pos + 1] not in _WHITESPACE:
        raise PgmFormatError('payload', "brak separatora po nagłówku")
    pos += 1

    expected = width * height
    payload = data[pos:pos + expected]
    if len(payload) < expected:
        raise PgmFormatError('payload', f"ucięte dane: {len(payload)} z {expected} bajtów")

    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return GrayImage(width=width, height=height, pixels=pixels)


def encode_pgm(image: GrayImage) -> bytes:
    """Serializuje obraz do P5 (maxval 255)."""
    header = f"P5\n{image.width} {image.height}\n255\n".encode('ascii')
    return header + image.pixels.tobytes()


def read_pgm_file(path) -> GrayImage:
    """
    Wczytuje plik PGM z dysku.

    Raises:
        PgmFormatError: z dopisaną ścieżką pliku
        OSError: plik nieczytelny
    """
    path = Path(path)
    data = path.read_bytes()
    try:
        return load_pgm(data)
    except PgmFormatError as e:
        raise PgmFormatError(e.field, f"{path}: {e.detail}") from e


def write_pgm_file(path, image: GrayImage):
    """Zapisuje obraz jako P5 PGM."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_pgm(image))
    logger.debug(f"[PGM] Zapisano {path} ({image.width}x{image.height})")
