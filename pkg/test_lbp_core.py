"""
Testy operatora LBP: kod 3x3, próbkowanie kołowe, mapowania u2 / riu2.
"""

import math

import numpy as np
import pytest
from scipy import ndimage

from collectors.pgm_reader import GrayImage
from descriptors.lbp_core import (
    ImageTooSmallError,
    Mapping,
    NeighborhoodSpec,
    basic_lbp_code,
    bin_count,
    build_mapping,
    lbp_map,
    neighbor_offsets,
    sample_circular_neighbors,
    uniformity,
)

AXIS_BITS = 0b01010101


def _rotate(code: int, shift: int, P: int) -> int:
    mask = (1 << P) - 1
    return ((code << shift) | (code >> (P - shift))) & mask


# ============================================
# BASIC CODE
# ============================================

def test_basic_code_flat_window_is_all_ones():
    assert basic_lbp_code(np.full((3, 3), 5)) == 255


def test_basic_code_bright_center_is_zero():
    window = np.zeros((3, 3))
    window[1, 1] = 255
    assert basic_lbp_code(window) == 0


def test_basic_code_ties_set_bits():
    window = np.zeros((3, 3))
    window[1, 2] = 1
    assert basic_lbp_code(window) == 255


def test_basic_code_neighbor_order():
    # tylko sąsiad górny (p=2) jaśniejszy niż centrum 10
    window = np.full((3, 3), 0)
    window[1, 1] = 10
    window[0, 1] = 20
    assert basic_lbp_code(window) == 1 << 2


def test_basic_code_matches_lbp_map_on_axis_neighbors(rng):
    spec = NeighborhoodSpec(8, 1.0, 'raw')
    for _ in range(200):
        block = rng.integers(0, 256, size=(3, 3))
        code = int(lbp_map(GrayImage.from_array(block), spec).codes[0, 0])
        assert code & AXIS_BITS == basic_lbp_code(block) & AXIS_BITS


def test_basic_code_matches_lbp_map_when_axis_neighbors_equal_center(rng):
    # wtedy próbka diagonalna ma znak różnicy piksela narożnego
    spec = NeighborhoodSpec(8, 1.0, 'raw')
    for _ in range(200):
        block = rng.integers(0, 256, size=(3, 3))
        block[0, 1] = block[1, 0] = block[1, 2] = block[2, 1] = block[1, 1]
        code = int(lbp_map(GrayImage.from_array(block), spec).codes[0, 0])
        assert code == basic_lbp_code(block)


# ============================================
# CIRCULAR SAMPLING
# ============================================

def test_neighbor_offsets_axis_positions_are_exact():
    dy, dx = neighbor_offsets(NeighborhoodSpec(8, 1.0))
    assert (dy[0], dx[0]) == (0.0, 1.0)
    assert (dy[2], dx[2]) == (-1.0, 0.0)
    assert (dy[4], dx[4]) == (0.0, -1.0)
    assert (dy[6], dx[6]) == (1.0, 0.0)
    assert dx[1] == pytest.approx(1 / math.sqrt(2))
    assert dy[1] == pytest.approx(-1 / math.sqrt(2))


def test_sample_axis_neighbors_are_pixel_reads(rng):
    pixels = rng.integers(0, 256, size=(9, 9)).astype(np.float64)
    image = GrayImage.from_array(pixels)
    samples = sample_circular_neighbors(image, 4, 4, NeighborhoodSpec(8, 1.0))
    assert samples[0] == pixels[4, 5]
    assert samples[2] == pixels[3, 4]
    assert samples[4] == pixels[4, 3]
    assert samples[6] == pixels[5, 4]


def test_sample_p4_reads_four_neighbors(rng):
    pixels = rng.integers(0, 256, size=(5, 5)).astype(np.float64)
    samples = sample_circular_neighbors(GrayImage.from_array(pixels), 2, 2, NeighborhoodSpec(4, 1.0))
    assert samples.tolist() == [pixels[2, 3], pixels[1, 2], pixels[2, 1], pixels[3, 2]]


def test_sample_diagonals_are_bilinear(rng):
    pixels = rng.integers(0, 256, size=(11, 11)).astype(np.float64)
    image = GrayImage.from_array(pixels)
    spec = NeighborhoodSpec(8, 2.5)
    dy, dx = neighbor_offsets(spec)
    samples = sample_circular_neighbors(image, 5, 5, spec)
    expected = ndimage.map_coordinates(pixels, [5 + dy, 5 + dx], order=1)
    np.testing.assert_allclose(samples, expected, rtol=0, atol=1e-9)


def test_sample_constant_image():
    image = GrayImage.from_array(np.full((7, 7), 42))
    samples = sample_circular_neighbors(image, 3, 3, NeighborhoodSpec(16, 2.0))
    assert np.all(samples == 42.0)


def test_sample_out_of_bounds():
    image = GrayImage.from_array(np.zeros((7, 7)))
    with pytest.raises(ValueError):
        sample_circular_neighbors(image, 1, 3, NeighborhoodSpec(8, 2.0))


# ============================================
# CODE MAPS
# ============================================

def test_lbp_map_constant_image_raw_and_riu2():
    image = GrayImage.from_array(np.full((10, 10), 7))
    raw = lbp_map(image, NeighborhoodSpec(8, 1.0, 'raw'))
    assert (raw.width, raw.height) == (8, 8)
    assert np.all(raw.codes == 255)
    riu2 = lbp_map(image, NeighborhoodSpec(8, 1.0, 'riu2'))
    assert np.all(riu2.codes == 8)


def test_lbp_map_crops_ceil_radius():
    image = GrayImage.from_array(np.zeros((16, 20)))
    code_map = lbp_map(image, NeighborhoodSpec(8, 1.5))
    assert (code_map.width, code_map.height) == (16, 12)


def test_lbp_map_vertical_edge_constant_along_columns():
    pixels = np.zeros((12, 12))
    pixels[:, 6:] = 200
    codes = lbp_map(GrayImage.from_array(pixels), NeighborhoodSpec(8, 1.0, 'raw')).codes
    assert np.all(codes == codes[0])
    assert len(np.unique(codes[0])) > 1


def test_lbp_map_too_small():
    with pytest.raises(ImageTooSmallError, match='minimum 5x5'):
        lbp_map(GrayImage.from_array(np.zeros((4, 8))), NeighborhoodSpec(8, 2.0))


def test_lbp_map_monotone_transform_invariance(rng):
    pixels = rng.integers(0, 128, size=(16, 16))
    spec = NeighborhoodSpec(4, 1.0, 'raw')
    before = lbp_map(GrayImage.from_array(pixels), spec).codes
    after = lbp_map(GrayImage.from_array(2 * pixels + 1), spec).codes
    assert np.array_equal(before, after)


# ============================================
# MAPPINGS
# ============================================

@pytest.mark.parametrize('code, expected', [(0b00000000, 0), (0b00001111, 2), (0b01010101, 8)])
def test_uniformity(code, expected):
    assert uniformity(code, 8) == expected


def test_uniformity_rejects_out_of_range():
    with pytest.raises(ValueError):
        uniformity(256, 8)


def test_bin_counts_for_p8():
    assert bin_count('u2', 8) == 59
    assert bin_count('riu2', 8) == 10
    assert bin_count('raw', 8) == 256
    assert NeighborhoodSpec(16, 2.0, 'riu2').bins == 18


def test_u2_table_has_58_uniform_bins():
    table = build_mapping(NeighborhoodSpec(8, 1.0, 'u2'))
    uniform = [c for c in range(256) if uniformity(c, 8) <= 2]
    assert len(uniform) == 58
    assert [int(table[c]) for c in uniform] == list(range(58))
    assert all(table[c] == 58 for c in range(256) if uniformity(c, 8) > 2)


def test_riu2_table_entries():
    table = build_mapping(NeighborhoodSpec(8, 1.0, 'riu2'))
    assert table[0b11111111] == 8
    assert table[0b00000000] == 0
    assert table[0b00111000] == 3
    assert table[0b01010101] == 9


def test_riu2_rotation_invariance_exhaustive():
    table = build_mapping(NeighborhoodSpec(8, 1.0, 'riu2'))
    for code in range(256):
        for shift in range(8):
            assert table[_rotate(code, shift, 8)] == table[code]


@pytest.mark.parametrize('mapping', list(Mapping))
def test_mapping_is_surjective(mapping):
    spec = NeighborhoodSpec(8, 1.0, mapping)
    table = build_mapping(spec)
    assert set(table.tolist()) == set(range(spec.bins))


def test_mapping_table_is_read_only():
    table = build_mapping(NeighborhoodSpec(8, 1.0, 'riu2'))
    with pytest.raises(ValueError):
        table[0] = 3


def test_mapping_rejects_large_p():
    with pytest.raises(ValueError):
        build_mapping(NeighborhoodSpec(17, 2.0, 'riu2'))


def test_neighborhood_spec_validation():
    with pytest.raises(ValueError):
        NeighborhoodSpec(3, 1.0)
    with pytest.raises(ValueError):
        NeighborhoodSpec(8, 0.0)
    with pytest.raises(ValueError):
        NeighborhoodSpec(8, 1.0, 'ri')
