# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementations of the hot kernels.

Must stay bit-identical to :mod:`haarscan._kernels_py`: same float64
operation order, no FMA contraction (enforced by -ffp-contract=off in
setup.py), IEEE sqrt.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor, sqrt

cnp.import_array()

BACKEND_NAME = "cython"


def integral_pair(cnp.ndarray[cnp.uint8_t, ndim=2] img):
    """Zero-padded summed-area tables (values and squared values), uint64."""
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    cdef cnp.ndarray[cnp.uint64_t, ndim=2] ii = np.zeros((h + 1, w + 1), dtype=np.uint64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=2] sq = np.zeros((h + 1, w + 1), dtype=np.uint64)
    cdef Py_ssize_t x, y
    cdef unsigned long long row_sum, row_sq, px
    with nogil:
        for y in range(h):
            row_sum = 0
            row_sq = 0
            for x in range(w):
                px = img[y, x]
                row_sum += px
                row_sq += px * px
                ii[y + 1, x + 1] = ii[y, x + 1] + row_sum
                sq[y + 1, x + 1] = sq[y, x + 1] + row_sq
    return ii, sq


def downsample_block(cnp.ndarray[cnp.uint8_t, ndim=2] img, int sf):
    """Integer box-filter downsample with round-half-up block means."""
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    cdef Py_ssize_t oh = h // sf
    cdef Py_ssize_t ow = w // sf
    cdef unsigned long long area = <unsigned long long>sf * <unsigned long long>sf
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.empty((oh, ow), dtype=np.uint8)
    cdef Py_ssize_t ox, oy, bx, by
    cdef unsigned long long s
    with nogil:
        for oy in range(oh):
            for ox in range(ow):
                s = 0
                for by in range(sf):
                    for bx in range(sf):
                        s += img[oy * sf + by, ox * sf + bx]
                out[oy, ox] = <cnp.uint8_t>((s * 2 + area) // (2 * area))
    return out


def warp_bilinear(cnp.ndarray[cnp.uint8_t, ndim=2] img,
                  cnp.ndarray[cnp.float64_t, ndim=1] inv,
                  int out_w, int out_h):
    """Affine warp via output->source map ``inv``; bilinear, zero fill."""
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    cdef double ia = inv[0], ib = inv[1], itx = inv[2]
    cdef double ic = inv[3], idd = inv[4], ity = inv[5]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.empty((out_h, out_w), dtype=np.uint8)
    cdef Py_ssize_t x, y
    cdef double sx, sy, fx, fy, p00, p01, p10, p11, top, bot, val
    cdef long x0, y0
    with nogil:
        for y in range(out_h):
            for x in range(out_w):
                sx = ia * x + ib * y + itx
                sy = ic * x + idd * y + ity
                x0 = <long>floor(sx)
                y0 = <long>floor(sy)
                fx = sx - x0
                fy = sy - y0
                p00 = img[y0, x0] if 0 <= x0 < w and 0 <= y0 < h else 0.0
                p01 = img[y0, x0 + 1] if 0 <= x0 + 1 < w and 0 <= y0 < h else 0.0
                p10 = img[y0 + 1, x0] if 0 <= x0 < w and 0 <= y0 + 1 < h else 0.0
                p11 = img[y0 + 1, x0 + 1] if 0 <= x0 + 1 < w and 0 <= y0 + 1 < h else 0.0
                top = (1.0 - fx) * p00 + fx * p01
                bot = (1.0 - fx) * p10 + fx * p11
                val = (1.0 - fy) * top + fy * bot
                out[y, x] = <cnp.uint8_t>floor(val + 0.5)
    return out


def scan_scale(cnp.ndarray[cnp.uint64_t, ndim=2] ii,
               cnp.ndarray[cnp.uint64_t, ndim=2] sq,
               int img_w, int img_h,
               int win_w, int win_h, int stride,
               int norm_x, int norm_y, int norm_w, int norm_h,
               cnp.ndarray[cnp.int32_t, ndim=1] rx,
               cnp.ndarray[cnp.int32_t, ndim=1] ry,
               cnp.ndarray[cnp.int32_t, ndim=1] rw,
               cnp.ndarray[cnp.int32_t, ndim=1] rh,
               cnp.ndarray[cnp.float64_t, ndim=1] rweight,
               cnp.ndarray[cnp.int32_t, ndim=1] stump_rect_start,
               cnp.ndarray[cnp.float64_t, ndim=1] stump_thr,
               cnp.ndarray[cnp.float64_t, ndim=1] stump_left,
               cnp.ndarray[cnp.float64_t, ndim=1] stump_right,
               cnp.ndarray[cnp.int32_t, ndim=1] stage_start,
               cnp.ndarray[cnp.float64_t, ndim=1] stage_thr):
    """Slide one window size; return row-major (x, y) offsets of windows
    passing every stage.  Mirrors _kernels_py.scan_scale exactly."""
    cdef Py_ssize_t nx = (img_w - win_w) // stride + 1
    cdef Py_ssize_t ny = (img_h - win_h) // stride + 1
    if nx <= 0 or ny <= 0:
        return (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))

    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_x = np.empty(nx * ny, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_y = np.empty(nx * ny, dtype=np.int64)
    cdef Py_ssize_t n_found = 0

    cdef int n_stages = stage_thr.shape[0]
    cdef double inv_area = 1.0 / (norm_w * norm_h)
    cdef Py_ssize_t gx, gy
    cdef int x, y, st, j, k, k0, k1
    cdef unsigned long long s1u, s2u
    cdef double s1, s2, mean, variance, sd, fscale, v, vn, acc
    cdef bint ok

    with nogil:
        for gy in range(ny):
            y = <int>(gy * stride)
            for gx in range(nx):
                x = <int>(gx * stride)
                s1u = (ii[y + norm_y, x + norm_x] + ii[y + norm_y + norm_h, x + norm_x + norm_w]) \
                    - (ii[y + norm_y, x + norm_x + norm_w] + ii[y + norm_y + norm_h, x + norm_x])
                s2u = (sq[y + norm_y, x + norm_x] + sq[y + norm_y + norm_h, x + norm_x + norm_w]) \
                    - (sq[y + norm_y, x + norm_x + norm_w] + sq[y + norm_y + norm_h, x + norm_x])
                s1 = <double>s1u
                s2 = <double>s2u
                mean = s1 * inv_area
                variance = s2 * inv_area - mean * mean
                sd = sqrt(variance) if variance > 0.0 else 0.0
                if sd < 1.0:
                    sd = 1.0
                fscale = inv_area / sd

                ok = True
                for st in range(n_stages):
                    acc = 0.0
                    for j in range(stage_start[st], stage_start[st + 1]):
                        k0 = stump_rect_start[j]
                        k1 = stump_rect_start[j + 1]
                        v = 0.0
                        for k in range(k0, k1):
                            s1u = (ii[y + ry[k], x + rx[k]] + ii[y + ry[k] + rh[k], x + rx[k] + rw[k]]) \
                                - (ii[y + ry[k], x + rx[k] + rw[k]] + ii[y + ry[k] + rh[k], x + rx[k]])
                            v = v + rweight[k] * <double>s1u
                        vn = v * fscale
                        acc = acc + (stump_left[j] if vn < stump_thr[j] else stump_right[j])
                    if acc < stage_thr[st]:
                        ok = False
                        break
                if ok:
                    out_x[n_found] = x
                    out_y[n_found] = y
                    n_found += 1
    return out_x[:n_found].copy(), out_y[:n_found].copy()
