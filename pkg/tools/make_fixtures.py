#!/usr/bin/env python3
"""Build the checked-in and generated test fixtures.

``--extract-crop`` cuts the real-face patch out of scikit-image's
bundled astronaut portrait (one-time, needs scikit-image; the result is
checked in so nothing else depends on it). Without flags, regenerates
the synthetic scene sets into fixtures/generated/ — frames are derived
deterministically from the checked-in patch, so this is reproducible on
any machine.
"""

from __future__ import annotations

import argparse
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import fixture_gen  # noqa: E402
from fixture_gen import REPO, FACE_CROP_PATH  # noqa: E402


def extract_crop() -> None:
    import numpy as np
    from skimage import data

    from haarscan import GrayImage, save_pgm
    from haarscan.image import luma_from_rgb

    rgb = data.astronaut()
    gray = luma_from_rgb(rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2])
    crop = GrayImage(gray[20:220, 140:340])
    os.makedirs(os.path.dirname(FACE_CROP_PATH), exist_ok=True)
    save_pgm(crop, FACE_CROP_PATH)
    print(f"wrote {FACE_CROP_PATH} ({crop.width}x{crop.height})")


def generate_sets(out_root: str) -> None:
    crop = fixture_gen.load_face_crop()

    small = fixture_gen.make_small_set(crop)
    fixture_gen.write_set(small, os.path.join(out_root, "small"),
                          os.path.join(out_root, "small_gt.jsonl"))
    print(f"wrote {len(small)} small frames")

    acc = fixture_gen.make_accuracy_set(crop)
    fixture_gen.write_set(acc, os.path.join(out_root, "accuracy"),
                          os.path.join(out_root, "accuracy_gt.jsonl"))
    print(f"wrote {len(acc)} accuracy frames")


def write_reference_gt() -> None:
    """Refresh the checked-in ground-truth files from the generators."""
    import json
    crop = fixture_gen.load_face_crop()
    gt_dir = os.path.join(REPO, "fixtures", "ground_truth")
    os.makedirs(gt_dir, exist_ok=True)
    for name, entries in (("accuracy_set.jsonl", fixture_gen.make_accuracy_set(crop)),
                          ("small_set.jsonl", fixture_gen.make_small_set(crop))):
        path = os.path.join(gt_dir, name)
        with open(path, "w", encoding="utf-8") as fh:
            for _, _, rec in entries:
                fh.write(json.dumps(rec.to_json(), separators=(",", ":")) + "\n")
        print(f"wrote {path}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--extract-crop", action="store_true",
                        help="re-cut the face patch from the astronaut "
                             "portrait (needs scikit-image)")
    parser.add_argument("--reference-gt", action="store_true",
                        help="refresh the checked-in ground-truth files")
    parser.add_argument("--out", default=os.path.join(REPO, "fixtures", "generated"),
                        help="output root for generated scene sets")
    args = parser.parse_args()
    if args.extract_crop:
        extract_crop()
    if args.reference_gt:
        write_reference_gt()
    if not args.extract_crop and not args.reference_gt:
        generate_sets(args.out)


if __name__ == "__main__":
    main()
