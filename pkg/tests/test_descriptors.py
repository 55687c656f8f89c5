import numpy as np
import pytest

from keygest.descriptors import (
    APPEARANCE_DIM,
    LBP_TOP_DIM,
    N_UNIFORM_BINS,
    UNIFORM_BIN,
    dense_patch_descriptors,
    image_gradients,
    lbp_code,
    lbp_codes,
    lbp_top,
    lbp_top_site_counts,
    normalize_blocks,
)
from keygest.sequence_io import Frame

from . import oracles


def test_flat_frame_gives_zero_descriptors():
    d = dense_patch_descriptors(Frame(np.full((32, 32), 77)))
    assert d.shape == (4, APPEARANCE_DIM)
    assert not d.any()


def test_vertical_edge_has_only_x_gradients():
    px = np.zeros((16, 16), dtype=np.uint8)
    px[:, 8:] = 200
    d = dense_patch_descriptors(Frame(px))[0].reshape(4, 4, 4)
    assert d[..., 1].any()  # sum |dx|
    assert not d[..., 3].any()  # sum |dy|
    assert not d[..., 2].any()
    assert np.linalg.norm(d) == pytest.approx(1.0)


def test_grid_count_and_stride():
    f = Frame(np.random.default_rng(0).integers(0, 256, (32, 32)))
    assert dense_patch_descriptors(f).shape == (4, 64)
    assert dense_patch_descriptors(f, stride=8).shape == (9, 64)
    with pytest.raises(ValueError):
        dense_patch_descriptors(Frame(np.zeros((15, 40))))
    with pytest.raises(ValueError):
        dense_patch_descriptors(f, stride=0)


def test_descriptor_matches_literal_cell_sums():
    px = np.random.default_rng(1).integers(0, 256, (16, 16)).astype(np.float64)
    p = np.pad(px, 1, mode="edge")
    raw = []
    for cy in range(4):
        for cx in range(4):
            sdx = sadx = sdy = sady = 0.0
            for y in range(cy * 4, cy * 4 + 4):
                for x in range(cx * 4, cx * 4 + 4):
                    dx = (p[y + 1, x + 2] - p[y + 1, x]) / 2
                    dy = (p[y + 2, x + 1] - p[y, x + 1]) / 2
                    sdx, sadx, sdy, sady = sdx + dx, sadx + abs(dx), sdy + dy, sady + abs(dy)
            raw += [sdx, sadx, sdy, sady]
    raw = np.array(raw)
    np.testing.assert_allclose(dense_patch_descriptors(Frame(px))[0], raw / np.linalg.norm(raw), atol=1e-12)


def test_descriptor_invariant_to_brightness_offset():
    px = np.random.default_rng(2).integers(0, 200, (32, 48))
    np.testing.assert_array_equal(dense_patch_descriptors(px), dense_patch_descriptors(px + 50))


def test_gradients_replicate_borders():
    dx, dy = image_gradients(np.array([[0, 2, 4], [0, 2, 4], [0, 2, 4]]))
    assert dx.tolist() == [[1.0, 2.0, 1.0]] * 3
    assert not dy.any()


def test_lbp_code_examples():
    assert lbp_code(Frame(np.full((3, 3), 9)), 1, 1) == 255
    px = np.zeros((3, 3), dtype=np.uint8)
    px[1, 1] = 255
    assert lbp_code(Frame(px), 1, 1) == 0
    px = np.zeros((3, 3), dtype=np.uint8)
    px[1, 2] = 1
    assert lbp_code(Frame(px), 1, 1) == 255
    with pytest.raises(IndexError):
        lbp_code(Frame(px), 0, 1)


def test_lbp_bit_order_is_clockwise_from_east():
    # center 5; only the south neighbour (x, y+1) reaches it
    px = np.zeros((3, 3), dtype=np.uint8)
    px[1, 1], px[2, 1] = 5, 9
    assert lbp_code(px, 1, 1) == 1 << 2


def test_vectorized_codes_match_oracle():
    px = np.random.default_rng(3).integers(0, 4, (7, 9))
    codes = lbp_codes(px)
    for y in range(1, 6):
        for x in range(1, 8):
            assert codes[y - 1, x - 1] == oracles.lbp(px, x, y) == lbp_code(px, x, y)


def test_lbp_invariant_under_monotone_transform():
    px = np.random.default_rng(4).integers(0, 100, (8, 8))
    np.testing.assert_array_equal(lbp_codes(px), lbp_codes(2 * px + 17))


def test_uniform_table():
    assert UNIFORM_BIN.max() == N_UNIFORM_BINS - 1
    assert (UNIFORM_BIN < 58).sum() == 58
    uniform = [c for c in range(256) if oracles.is_uniform(c)]
    assert UNIFORM_BIN[uniform].tolist() == list(range(58))


def test_lbp_top_constant_volume():
    h = lbp_top(np.full((5, 4, 6), 3, dtype=np.uint8))
    assert h.shape == (LBP_TOP_DIM,) == (177,)
    top = UNIFORM_BIN[255]
    for block, count in enumerate(lbp_top_site_counts(5, 4, 6)):
        assert h[block * 59 + top] == count
        assert h[block * 59:(block + 1) * 59].sum() == count


@pytest.mark.parametrize("seed", range(3))
def test_lbp_top_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    vol = rng.integers(0, 5, tuple(rng.integers(3, 7, 3)))
    assert lbp_top(vol).tolist() == oracles.lbp_top(vol.tolist())


def test_lbp_top_xt_equals_yt_for_symmetric_static_volume():
    a = np.random.default_rng(5).integers(0, 256, (6, 6))
    sym = np.triu(a) + np.triu(a, 1).T
    vol = np.repeat(sym[:, :, None], 5, axis=2)
    h = lbp_top(vol)
    np.testing.assert_array_equal(h[59:118], h[118:])


def test_lbp_top_rejects_thin_volume():
    with pytest.raises(ValueError):
        lbp_top(np.zeros((5, 5, 2)))


def test_normalize_blocks():
    h = normalize_blocks(np.concatenate([np.ones(59), np.zeros(59), np.arange(59)]))
    assert h[:59].sum() == pytest.approx(1.0)
    assert not h[59:118].any()
    assert h[118:].sum() == pytest.approx(1.0)
