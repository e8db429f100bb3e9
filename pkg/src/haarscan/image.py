"""Grayscale raster type, PGM/PNG codecs, downsampling, affine warps.

Every operation is a pure function; :class:`GrayImage` pixel buffers are
marked read-only at construction so instances can be shared freely
across threads.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from PIL import Image as _PILImage, UnidentifiedImageError

from . import backend
from .errors import FormatError, InvalidScale, SingularMatrix
from .geometry import round_half_up

PathLike = Union[str, "os.PathLike[str]"]


class GrayImage:
    """8-bit single-channel raster, stored as an immutable (h, w) array."""

    __slots__ = ("pixels",)

    def __init__(self, pixels: np.ndarray):
        arr = np.asarray(pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise FormatError(
                f"expected a non-empty 2-D array, got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            raise FormatError(f"expected integer pixels, got dtype {arr.dtype}")
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        arr.setflags(write=False)
        self.pixels = arr

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def data(self) -> bytes:
        """Row-major pixel bytes, length width * height."""
        return self.pixels.tobytes()

    def __eq__(self, other) -> bool:
        return isinstance(other, GrayImage) and np.array_equal(self.pixels, other.pixels)

    def __repr__(self) -> str:
        return f"GrayImage({self.width}x{self.height})"


def check_scale(sf: float) -> float:
    """Validate a downsampling scale factor (must be >= 1)."""
    sf = float(sf)
    if not math.isfinite(sf) or sf < 1.0:
        raise InvalidScale(f"SF must be >= 1, got {sf}")
    return sf


def luma_from_rgb(r: np.ndarray, g: np.ndarray, b: np.ndarray) -> np.ndarray:
    """BT.601 luma with round-half-up, in exact integer arithmetic."""
    lum = 299 * r.astype(np.uint32) + 587 * g.astype(np.uint32) + 114 * b.astype(np.uint32)
    return ((lum + 500) // 1000).astype(np.uint8)


# ---------------------------------------------------------------------------
# codecs

def _decode_pgm(blob: bytes) -> GrayImage:
    # header: P5, width, height, maxval as whitespace-separated tokens,
    # '#' comments allowed, then exactly one whitespace byte before payload
    if blob[:2] != b"P5":
        raise FormatError(f"not a binary PGM (magic {blob[:2]!r})")
    pos = 2  # past magic
    tokens = []
    while len(tokens) < 3:
        while pos < len(blob) and blob[pos:pos + 1].isspace():
            pos += 1
        if pos < len(blob) and blob[pos:pos + 1] == b"#":
            while pos < len(blob) and blob[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(blob) and not blob[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("truncated PGM header")
        tokens.append(blob[start:pos])
    pos += 1  # single whitespace after maxval
    try:
        w, h, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise FormatError(f"bad PGM header token: {exc}") from None
    if w < 1 or h < 1:
        raise FormatError(f"bad PGM dimensions {w}x{h}")
    if maxval != 255:
        raise FormatError(f"only maxval 255 PGM supported, got {maxval}")
    payload = blob[pos:pos + w * h]
    if len(payload) < w * h:
        raise FormatError(
            f"PGM payload has {len(payload)} bytes, header declares {w}x{h}={w * h}")
    return GrayImage(np.frombuffer(payload, dtype=np.uint8).reshape(h, w))


def _decode_png(blob: bytes) -> GrayImage:
    try:
        pil = _PILImage.open(io.BytesIO(blob))
        pil.load()
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise FormatError(f"not a decodable PNG: {exc}") from None
    if pil.mode == "L":
        return GrayImage(np.asarray(pil, dtype=np.uint8))
    if pil.mode == "RGB":
        arr = np.asarray(pil, dtype=np.uint8)
        return GrayImage(luma_from_rgb(arr[..., 0], arr[..., 1], arr[..., 2]))
    raise FormatError(
        f"unsupported PNG mode {pil.mode!r}; only 8-bit grayscale or RGB accepted")


def load_image(path: PathLike) -> GrayImage:
    """Read a binary PGM (P5, maxval 255) or an 8-bit gray/RGB PNG.

    RGB inputs are converted through BT.601 luma with round-half-up.
    Raises OSError for unreadable paths and FormatError for anything
    that is not a supported raster.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:2] == b"P5":
        return _decode_pgm(blob)
    if blob[:8] == b"\x89PNG\r\n\x1a\n":
        return _decode_png(blob)
    raise FormatError(f"unsupported image magic {blob[:2]!r} in {path}")


def encode_pgm(img: GrayImage) -> bytes:
    """P5 bytes: ``P5\\n<w> <h>\\n255\\n`` followed by the raw payload."""
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.data


def save_pgm(img: GrayImage, path: PathLike) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_pgm(img))


def encode_png(img: GrayImage) -> bytes:
    buf = io.BytesIO()
    _PILImage.fromarray(img.pixels, mode="L").save(buf, format="PNG")
    return buf.getvalue()


def save_png(img: GrayImage, path: PathLike) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_png(img))


# ---------------------------------------------------------------------------
# resampling

def _area_average_1d(values: np.ndarray, sf: float, out_n: int) -> np.ndarray:
    """Exact area averages of a piecewise-constant signal over spans of
    length sf, evaluated through a linear-interpolated prefix sum."""
    n = values.shape[-1]
    ext = np.concatenate([values, np.zeros(values.shape[:-1] + (1,))], axis=-1)
    prefix = np.concatenate(
        [np.zeros(values.shape[:-1] + (1,)), np.cumsum(values, axis=-1)], axis=-1)

    edges = np.arange(out_n + 1, dtype=np.float64) * sf
    k = np.minimum(np.floor(edges).astype(np.int64), n)
    frac = edges - k
    cum = prefix[..., k] + frac * ext[..., k]
    return (cum[..., 1:] - cum[..., :-1]) / sf


def downsample(img: GrayImage, sf: float) -> GrayImage:
    """Box-filter downsample by scale factor sf.

    Output is floor(w/sf) x floor(h/sf); each output pixel is the
    round-half-up mean of its source block.  Integer factors use the
    exact integer block mean; fractional factors use area-weighted
    resampling.  sf = 1 returns a value-identical copy.
    """
    sf = check_scale(sf)
    out_w = math.floor(img.width / sf)
    out_h = math.floor(img.height / sf)
    if out_w < 1 or out_h < 1:
        raise InvalidScale(
            f"SF {sf} collapses a {img.width}x{img.height} image to zero size")
    if sf == 1.0:
        return GrayImage(img.pixels)
    if float(sf).is_integer():
        return GrayImage(backend.kernels.downsample_block(img.pixels, int(sf)))
    horiz = _area_average_1d(img.pixels.astype(np.float64), sf, out_w)
    vert = _area_average_1d(np.ascontiguousarray(horiz.T), sf, out_h)
    return GrayImage(np.floor(vert.T + 0.5).astype(np.uint8))


# ---------------------------------------------------------------------------
# affine maps

@dataclass(frozen=True)
class AffineMatrix:
    """Row-major 2x3 affine map: x' = a x + b y + tx, y' = c x + d y + ty."""

    a: float
    b: float
    tx: float
    c: float
    d: float
    ty: float

    def apply(self, x: float, y: float) -> tuple[float, float]:
        return (self.a * x + self.b * y + self.tx,
                self.c * x + self.d * y + self.ty)

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "AffineMatrix":
        det = self.det()
        if abs(det) < 1e-12:
            raise SingularMatrix(f"affine matrix not invertible (det={det})")
        ia = self.d / det
        ib = -self.b / det
        ic = -self.c / det
        idd = self.a / det
        return AffineMatrix(ia, ib, -(ia * self.tx + ib * self.ty),
                            ic, idd, -(ic * self.tx + idd * self.ty))


def rotation_matrix(center: tuple[float, float], angle: float,
                    scale: float = 1.0) -> AffineMatrix:
    """Rotation by ``angle`` degrees about ``center`` with uniform scale.

    Positive angles rotate counter-clockwise in standard math axes,
    which appears clockwise on screen with y pointing down.  angle=0,
    scale=1 yields the exact identity map.
    """
    if not (scale > 0):
        raise InvalidScale(f"rotation scale must be positive, got {scale}")
    cx, cy = center
    theta = math.radians(angle)
    alpha = scale * math.cos(theta)
    beta = scale * math.sin(theta)
    return AffineMatrix(alpha, beta, (1.0 - alpha) * cx - beta * cy,
                        -beta, alpha, beta * cx + (1.0 - alpha) * cy)


def warp_affine(img: GrayImage, m: AffineMatrix, out_w: int, out_h: int) -> GrayImage:
    """Apply the forward map ``m`` to the image.

    Each output pixel samples the source at the inverse-mapped location
    with bilinear interpolation; locations outside the source fill with 0.
    """
    if out_w < 1 or out_h < 1:
        raise ValueError(f"output dimensions must be >= 1, got {out_w}x{out_h}")
    inv = m.inverse()
    coeffs = np.array([inv.a, inv.b, inv.tx, inv.c, inv.d, inv.ty], dtype=np.float64)
    return GrayImage(backend.kernels.warp_bilinear(img.pixels, coeffs, out_w, out_h))


def grid_center(width: int, height: int) -> tuple[float, float]:
    """Center of a width x height pixel grid: ((w-1)/2, (h-1)/2).

    Rotating about this point keeps grid-aligned content grid-aligned
    (a 180-degree turn maps pixel (0,0) exactly onto (w-1, h-1)).
    """
    return ((width - 1) / 2.0, (height - 1) / 2.0)


def rotate(img: GrayImage, angle: float) -> GrayImage:
    """Rotate about the grid center, keeping the original frame size."""
    m = rotation_matrix(grid_center(img.width, img.height), angle, 1.0)
    return warp_affine(img, m, img.width, img.height)
