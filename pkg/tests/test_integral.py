"""Tests for summed-area tables against exact pure-Python oracles."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haarscan import (
    GrayImage,
    IntegralImage,
    OutOfBounds,
    Rect,
    integral,
    integral_images,
    rect_sum,
    squared_integral,
)

from helpers import integral_oracle, random_image, rect_sum_oracle, squared_integral_oracle


def _rand(width: int, height: int, seed: int) -> GrayImage:
    return random_image(np.random.default_rng(seed), width, height)


# ---------------------------------------------------------------------------
# Table construction vs. brute-force oracle
# ---------------------------------------------------------------------------


def test_integral_tiny_hand_example() -> None:
    img = GrayImage(np.array([[1, 2], [3, 4]], np.uint8))
    ii = integral(img)
    assert ii.table.tolist() == [[0, 0, 0], [0, 1, 3], [0, 4, 10]]
    sq = squared_integral(img)
    assert sq.table.tolist() == [[0, 0, 0], [0, 1, 5], [0, 10, 30]]


def test_integral_shape_and_padding() -> None:
    img = _rand(7, 5, seed=1)
    ii = integral(img)
    assert ii.table.shape == (6, 8)
    assert ii.table.dtype == np.uint64
    assert np.all(ii.table[0, :] == 0)
    assert np.all(ii.table[:, 0] == 0)
    assert (ii.source_width, ii.source_height) == (7, 5)


@given(st.integers(1, 32), st.integers(1, 32), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_integral_matches_oracle(width: int, height: int, seed: int) -> None:
    img = _rand(width, height, seed)
    assert integral(img).table.tolist() == integral_oracle(img.pixels)


@given(st.integers(1, 24), st.integers(1, 24), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_squared_integral_matches_oracle(width: int, height: int, seed: int) -> None:
    img = _rand(width, height, seed)
    assert squared_integral(img).table.tolist() == squared_integral_oracle(img.pixels)


def test_integral_images_single_pass_pair() -> None:
    img = _rand(16, 12, seed=3)
    ii, sq = integral_images(img)
    assert ii.kind == "plain" and sq.kind == "squared"
    assert np.array_equal(ii.table, integral(img).table)
    assert np.array_equal(sq.table, squared_integral(img).table)


def test_integral_table_read_only() -> None:
    ii = integral(_rand(4, 4, seed=0))
    with pytest.raises(ValueError):
        ii.table[0, 0] = 1


def test_integral_image_kind_validation() -> None:
    with pytest.raises(ValueError):
        IntegralImage(np.zeros((2, 2), np.uint64), kind="cubed")


def test_integral_all_white_no_overflow() -> None:
    # 255^2 * 512 * 512 = 17,043,456,000 fits easily in uint64; verify the
    # corner of a large saturated image is exact.
    img = GrayImage(np.full((512, 512), 255, np.uint8))
    ii, sq = integral_images(img)
    assert int(ii.table[-1, -1]) == 255 * 512 * 512
    assert int(sq.table[-1, -1]) == 255 * 255 * 512 * 512


# ---------------------------------------------------------------------------
# rect_sum
# ---------------------------------------------------------------------------


def test_rect_sum_hand_example() -> None:
    img = GrayImage(np.arange(1, 10, dtype=np.uint8).reshape(3, 3))
    ii = integral(img)
    assert rect_sum(ii, Rect(0, 0, 3, 3)) == 45
    assert rect_sum(ii, Rect(1, 1, 2, 2)) == 5 + 6 + 8 + 9
    assert rect_sum(ii, Rect(2, 0, 1, 3)) == 3 + 6 + 9
    assert rect_sum(ii, Rect(0, 2, 3, 1)) == 7 + 8 + 9


@given(
    st.integers(1, 24),
    st.integers(1, 24),
    st.integers(0, 2**32 - 1),
    st.data(),
)
@settings(max_examples=60, deadline=None)
def test_rect_sum_matches_slice_oracle(width, height, seed, data) -> None:
    img = _rand(width, height, seed)
    ii = integral(img)
    x = data.draw(st.integers(0, width - 1))
    y = data.draw(st.integers(0, height - 1))
    w = data.draw(st.integers(1, width - x))
    h = data.draw(st.integers(1, height - y))
    r = Rect(x, y, w, h)
    assert rect_sum(ii, r) == rect_sum_oracle(img.pixels, r)


def test_rect_sum_squared_table() -> None:
    img = _rand(10, 10, seed=5)
    sq = squared_integral(img)
    r = Rect(2, 3, 5, 4)
    expect = int((img.pixels[3:7, 2:7].astype(np.uint64) ** 2).sum())
    assert rect_sum(sq, r) == expect


def test_rect_sum_full_frame_equals_total() -> None:
    img = _rand(13, 8, seed=9)
    ii = integral(img)
    assert rect_sum(ii, Rect(0, 0, 13, 8)) == int(img.pixels.sum(dtype=np.uint64))


def test_rect_sum_out_of_bounds() -> None:
    img = _rand(8, 8, seed=2)
    ii = integral(img)
    with pytest.raises(OutOfBounds):
        rect_sum(ii, Rect(0, 0, 9, 8))
    with pytest.raises(OutOfBounds):
        rect_sum(ii, Rect(0, 0, 8, 9))
    with pytest.raises(OutOfBounds):
        rect_sum(ii, Rect(5, 5, 4, 4))
    # Exactly touching the border is fine.
    assert rect_sum(ii, Rect(7, 7, 1, 1)) == int(img.pixels[7, 7])


def test_rect_sum_additivity() -> None:
    # Sum over a rect equals the sum of a 2x2 split of that rect.
    img = _rand(20, 20, seed=11)
    ii = integral(img)
    whole = rect_sum(ii, Rect(4, 6, 10, 8))
    parts = (
        rect_sum(ii, Rect(4, 6, 5, 4))
        + rect_sum(ii, Rect(9, 6, 5, 4))
        + rect_sum(ii, Rect(4, 10, 5, 4))
        + rect_sum(ii, Rect(9, 10, 5, 4))
    )
    assert whole == parts
