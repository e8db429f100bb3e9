"""Pure-numpy implementations of the hot kernels.

This module is the fallback used when the compiled extension
(:mod:`haarscan._kernels`) is unavailable.  Both backends must produce
bit-identical output: every float64 operation here is written in the
exact order the Cython loops use, and the extension is compiled with
FMA contraction disabled so the IEEE semantics line up.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def integral_pair(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Zero-padded summed-area tables of pixel values and squared values.

    Returns two uint64 arrays of shape (h+1, w+1); row 0 and column 0
    are zero, entry [y, x] is the sum over the source rectangle
    [0, x) x [0, y).
    """
    src = img.astype(np.uint64)
    h, w = src.shape
    ii = np.zeros((h + 1, w + 1), dtype=np.uint64)
    sq = np.zeros((h + 1, w + 1), dtype=np.uint64)
    ii[1:, 1:] = src.cumsum(axis=0).cumsum(axis=1)
    sq[1:, 1:] = (src * src).cumsum(axis=0).cumsum(axis=1)
    return ii, sq


def downsample_block(img: np.ndarray, sf: int) -> np.ndarray:
    """Integer box-filter downsample: each output pixel is the
    round-half-up mean of its sf x sf source block.

    Right/bottom remainder columns and rows (when sf does not divide the
    source dimensions) are cropped, matching floor(w/sf) output sizing.
    """
    h, w = img.shape
    oh, ow = h // sf, w // sf
    area = sf * sf
    blocks = img[:oh * sf, :ow * sf].astype(np.uint64)
    sums = blocks.reshape(oh, sf, ow, sf).sum(axis=(1, 3))
    # round-half-up of sums/area in pure integer arithmetic
    return ((sums * 2 + area) // (2 * area)).astype(np.uint8)


def warp_bilinear(img: np.ndarray, inv: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Sample an affine warp with bilinear interpolation, zero fill outside.

    ``inv`` holds the six coefficients (ia, ib, itx, ic, id, ity) of the
    output->source map; output pixel (x, y) reads the source at
    (ia*x + ib*y + itx, ic*x + id*y + ity).
    """
    h, w = img.shape
    ia, ib, itx, ic, idd, ity = (float(v) for v in inv)

    ys, xs = np.meshgrid(np.arange(out_h, dtype=np.float64),
                         np.arange(out_w, dtype=np.float64), indexing="ij")
    sx = ia * xs + ib * ys + itx
    sy = ic * xs + idd * ys + ity

    x0 = np.floor(sx).astype(np.int64)
    y0 = np.floor(sy).astype(np.int64)
    fx = sx - x0
    fy = sy - y0

    def fetch(yy, xx):
        inside = (xx >= 0) & (xx < w) & (yy >= 0) & (yy < h)
        vals = img[np.clip(yy, 0, h - 1), np.clip(xx, 0, w - 1)].astype(np.float64)
        return np.where(inside, vals, 0.0)

    p00 = fetch(y0, x0)
    p01 = fetch(y0, x0 + 1)
    p10 = fetch(y0 + 1, x0)
    p11 = fetch(y0 + 1, x0 + 1)

    top = (1.0 - fx) * p00 + fx * p01
    bot = (1.0 - fx) * p10 + fx * p11
    val = (1.0 - fy) * top + fy * bot
    return np.floor(val + 0.5).astype(np.uint8)


def scan_scale(ii: np.ndarray, sq: np.ndarray,
               img_w: int, img_h: int,
               win_w: int, win_h: int, stride: int,
               norm_x: int, norm_y: int, norm_w: int, norm_h: int,
               rx: np.ndarray, ry: np.ndarray, rw: np.ndarray, rh: np.ndarray,
               rweight: np.ndarray,
               stump_rect_start: np.ndarray,
               stump_thr: np.ndarray, stump_left: np.ndarray, stump_right: np.ndarray,
               stage_start: np.ndarray, stage_thr: np.ndarray,
               ) -> tuple[np.ndarray, np.ndarray]:
    """Slide one window size over the integral images and return the
    (x, y) offsets of windows that pass every cascade stage.

    Feature rects are window-relative, already scaled and rounded for
    this window size; ``rweight`` is already re-normalized.  Output
    positions come back in row-major scan order.
    """
    nx = (img_w - win_w) // stride + 1
    ny = (img_h - win_h) // stride + 1
    if nx <= 0 or ny <= 0:
        return (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))

    xs0 = np.arange(nx, dtype=np.int64) * stride
    ys0 = np.arange(ny, dtype=np.int64) * stride
    ym, xm = np.meshgrid(ys0, xs0, indexing="ij")
    X = xm.ravel()
    Y = ym.ravel()

    def rsum(table, xoff, yoff, ww, hh, xsv, ysv):
        a = table[ysv + yoff, xsv + xoff]
        b = table[ysv + yoff, xsv + xoff + ww]
        c = table[ysv + yoff + hh, xsv + xoff]
        d = table[ysv + yoff + hh, xsv + xoff + ww]
        # (a + d) - (b + c) stays non-negative in uint64
        return ((a + d) - (b + c)).astype(np.float64)

    inv_area = 1.0 / (norm_w * norm_h)
    s1 = rsum(ii, norm_x, norm_y, norm_w, norm_h, X, Y)
    s2 = rsum(sq, norm_x, norm_y, norm_w, norm_h, X, Y)
    mean = s1 * inv_area
    variance = s2 * inv_area - mean * mean
    sd = np.sqrt(np.maximum(variance, 0.0))
    sd = np.maximum(sd, 1.0)
    fscale = inv_area / sd

    n_stages = len(stage_thr)
    for st in range(n_stages):
        acc = np.zeros(X.shape[0], dtype=np.float64)
        for j in range(int(stage_start[st]), int(stage_start[st + 1])):
            k0 = int(stump_rect_start[j])
            k1 = int(stump_rect_start[j + 1])
            v = rweight[k0] * rsum(ii, int(rx[k0]), int(ry[k0]),
                                   int(rw[k0]), int(rh[k0]), X, Y)
            for k in range(k0 + 1, k1):
                v = v + rweight[k] * rsum(ii, int(rx[k]), int(ry[k]),
                                          int(rw[k]), int(rh[k]), X, Y)
            vn = v * fscale
            acc = acc + np.where(vn < stump_thr[j], stump_left[j], stump_right[j])
        alive = acc >= stage_thr[st]
        if not alive.all():
            X = X[alive]
            Y = Y[alive]
            fscale = fscale[alive]
            if X.shape[0] == 0:
                return (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
    return X, Y
