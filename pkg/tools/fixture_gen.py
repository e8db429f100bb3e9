"""Deterministic synthetic test-scene generation.

Every scene is built from the one checked-in real-face patch
(``fixtures/images/face_crop.pgm``) pasted over seeded gradient-noise
backgrounds, so the whole corpus regenerates bit-identically from the
repository. The backgrounds were chosen empirically to never fire the
pre-trained face cascade on their own (verified over the scale-factor
sweep), and the 1.6x face scale makes faces detectable at SF 1-6 but
reliably lost at SF 12 (149 px face -> 12.4 px, below the 20 px base
window).
"""

from __future__ import annotations

import os

import numpy as np

from haarscan import GrayImage, GroundTruthRecord, Rect, load_image, save_pgm
from haarscan.image import AffineMatrix, warp_affine

HERE = os.path.dirname(os.path.abspath(__file__))
REPO = os.path.dirname(HERE)
FACE_CROP_PATH = os.path.join(REPO, "fixtures", "images", "face_crop.pgm")

# the face's bounding box inside the 200x200 crop, marked by hand
FACE_IN_CROP = Rect(38, 48, 93, 93)

FACE_SCALE = 1.6  # crop scale in the standard 640x480 plates
PLATE_SIZE = (640, 480)
SMALL_PLATE_SIZE = (320, 240)
SMALL_FACE_SCALE = 0.8


def load_face_crop() -> GrayImage:
    return load_image(FACE_CROP_PATH)


def upscale(img: GrayImage, s: float) -> GrayImage:
    m = AffineMatrix(a=s, b=0.0, tx=0.0, c=0.0, d=s, ty=0.0)
    return warp_affine(img, m, round(img.width * s), round(img.height * s))


def make_background(width: int, height: int, seed: int,
                    x_span: tuple[float, float] = (60.0, 120.0),
                    y_span: tuple[float, float] = (0.0, 40.0),
                    noise: float = 2.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    gx = np.linspace(x_span[0], x_span[1], width, dtype=np.float64)[None, :]
    gy = np.linspace(y_span[0], y_span[1], height, dtype=np.float64)[:, None]
    return (gx + gy + rng.normal(0.0, noise, (height, width))).clip(0, 255).astype(np.uint8)


def make_face_plate(crop: GrayImage, pos: tuple[int, int],
                    size: tuple[int, int] = PLATE_SIZE,
                    face_scale: float = FACE_SCALE,
                    bg_seed: int = 7) -> tuple[GrayImage, Rect]:
    """Background plate with the face patch pasted at ``pos``; returns
    the plate and the face's ground-truth box in plate coordinates."""
    w, h = size
    bg = make_background(w, h, bg_seed)
    fc = upscale(crop, face_scale).pixels
    fh, fw = fc.shape
    x, y = pos
    if not (0 <= x <= w - fw and 0 <= y <= h - fh):
        raise ValueError(f"patch at {pos} does not fit a {w}x{h} plate")
    bg[y:y + fh, x:x + fw] = fc
    box = Rect(x + round(FACE_IN_CROP.x * face_scale),
               y + round(FACE_IN_CROP.y * face_scale),
               round(FACE_IN_CROP.w * face_scale),
               round(FACE_IN_CROP.h * face_scale))
    return GrayImage(bg), box


def make_absent_plate(index: int, size: tuple[int, int] = PLATE_SIZE) -> GrayImage:
    w, h = size
    return GrayImage(make_background(
        w, h, seed=100 + index,
        x_span=(40.0 + (index % 8) * 10.0, 140.0), y_span=(0.0, 60.0),
        noise=3.0))


def _face_positions(n: int, size: tuple[int, int], face_scale: float,
                    seed: int) -> list[tuple[int, int]]:
    w, h = size
    crop_px = round(200 * face_scale)
    mx = max(1, w // 16)
    my = max(1, h // 24)
    rng = np.random.default_rng(seed)
    return [(int(rng.integers(mx, w - crop_px - mx)),
             int(rng.integers(my, h - crop_px - my))) for _ in range(n)]


def make_accuracy_set(crop: GrayImage, n: int = 48,
                      size: tuple[int, int] = PLATE_SIZE,
                      face_scale: float = FACE_SCALE,
                      ) -> list[tuple[str, GrayImage, GroundTruthRecord]]:
    """Alternating present/absent plates with ground truth; even indices
    carry a face, odd ones are background-only."""
    n_present = (n + 1) // 2
    positions = _face_positions(n_present, size, face_scale, seed=2000)
    out = []
    pi = 0
    for i in range(n):
        frame_id = f"f{i:03d}"
        if i % 2 == 0:
            img, box = make_face_plate(crop, positions[pi], size, face_scale,
                                       bg_seed=3000 + i)
            pi += 1
            rec = GroundTruthRecord(frame_id=frame_id, face_present=True,
                                    face_box=box, eyes_present=True)
        else:
            img = make_absent_plate(i, size)
            rec = GroundTruthRecord(frame_id=frame_id, face_present=False,
                                    eyes_present=False)
        out.append((frame_id, img, rec))
    return out


def make_speed_sequence(crop: GrayImage, n: int = 100,
                        size: tuple[int, int] = PLATE_SIZE,
                        face_scale: float = FACE_SCALE) -> list[GrayImage]:
    """n face-present frames with varied placement (each frame unique)."""
    positions = _face_positions(n, size, face_scale, seed=5000)
    return [make_face_plate(crop, pos, size, face_scale, bg_seed=6000 + i)[0]
            for i, pos in enumerate(positions)]


def make_small_set(crop: GrayImage, n: int = 10,
                   ) -> list[tuple[str, GrayImage, GroundTruthRecord]]:
    """Compact 320x240 set for CLI/server tests (fast to scan)."""
    n_present = (n + 1) // 2
    positions = _face_positions(n_present, SMALL_PLATE_SIZE, SMALL_FACE_SCALE,
                                seed=8000)
    out = []
    pi = 0
    for i in range(n):
        frame_id = f"s{i:03d}"
        if i % 2 == 0:
            img, box = make_face_plate(crop, positions[pi], SMALL_PLATE_SIZE,
                                       SMALL_FACE_SCALE, bg_seed=9000 + i)
            pi += 1
            rec = GroundTruthRecord(frame_id=frame_id, face_present=True,
                                    face_box=box, eyes_present=True)
        else:
            img = make_absent_plate(50 + i, SMALL_PLATE_SIZE)
            rec = GroundTruthRecord(frame_id=frame_id, face_present=False,
                                    eyes_present=False)
        out.append((frame_id, img, rec))
    return out


def write_set(entries, frames_dir: str, gt_path: str | None = None) -> None:
    os.makedirs(frames_dir, exist_ok=True)
    lines = []
    for frame_id, img, rec in entries:
        save_pgm(img, os.path.join(frames_dir, f"{frame_id}.pgm"))
        if rec is not None:
            import json
            lines.append(json.dumps(rec.to_json(), separators=(",", ":")))
    if gt_path is not None:
        with open(gt_path, "w", encoding="utf-8") as fh:
            fh.write("".join(line + "\n" for line in lines))
