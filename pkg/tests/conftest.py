"""Shared fixtures: cascades, synthetic scene sets, tilt scenario.

Scene images are generated deterministically (tools/fixture_gen) into a
session-scoped temp directory; the checked-in ground-truth files under
fixtures/ground_truth describe exactly these sets, and a drift-guard
test asserts they stay in sync with the generators.
"""

from __future__ import annotations

import os
import sys

import pytest

REPO = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(REPO, "tools"))

import fixture_gen  # noqa: E402
from haarscan import load_cascade, load_ground_truth  # noqa: E402

FIXTURES = os.path.join(REPO, "fixtures")
FACE_CASCADE_PATH = os.path.join(FIXTURES, "cascades", "frontalface_alt.xml")
EYE_CASCADE_PATH = os.path.join(FIXTURES, "cascades", "eye.xml")
ACCURACY_GT_PATH = os.path.join(FIXTURES, "ground_truth", "accuracy_set.jsonl")
SMALL_GT_PATH = os.path.join(FIXTURES, "ground_truth", "small_set.jsonl")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One ACCEPTANCE line per criterion in the run summary.

    A criterion passes only if its call phase passed; errors, failures
    and skips all count as FAIL so the gate can never look green by
    accident."""
    marker = "test_acceptance.py::test_"
    outcomes: dict[str, bool] = {}
    for status in ("passed", "failed", "error", "skipped"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            pos = nodeid.find(marker)
            if pos < 0:
                continue
            name = nodeid[pos + len(marker):]
            if status == "passed" and getattr(rep, "when", "") == "call":
                outcomes.setdefault(name, True)
            else:
                outcomes[name] = False
    if not outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(outcomes):
        verdict = "PASS" if outcomes[name] else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {name}: {verdict}")


@pytest.fixture(scope="session")
def face_cascade():
    return load_cascade(FACE_CASCADE_PATH)


@pytest.fixture(scope="session")
def eye_cascade():
    return load_cascade(EYE_CASCADE_PATH)


@pytest.fixture(scope="session")
def face_crop():
    return fixture_gen.load_face_crop()


@pytest.fixture(scope="session")
def small_set(face_crop):
    """10 compact 320x240 plates: (frame_id, image, gt record) tuples."""
    return fixture_gen.make_small_set(face_crop)


@pytest.fixture(scope="session")
def small_set_dir(small_set, tmp_path_factory):
    """The small set written to disk: (frames_dir, gt_path)."""
    root = tmp_path_factory.mktemp("small_set")
    frames = root / "frames"
    gt = root / "gt.jsonl"
    fixture_gen.write_set(small_set, str(frames), str(gt))
    return str(frames), str(gt)


@pytest.fixture(scope="session")
def accuracy_set(face_crop):
    """48 annotated 640x480 plates, half face-present."""
    return fixture_gen.make_accuracy_set(face_crop)


@pytest.fixture(scope="session")
def accuracy_gt():
    return load_ground_truth(ACCURACY_GT_PATH)


@pytest.fixture(scope="session")
def speed_sequence(face_crop):
    """100 face-present 640x480 frames for throughput runs."""
    return fixture_gen.make_speed_sequence(face_crop)


@pytest.fixture(scope="session")
def tilt_scene(face_crop):
    """An upright face plate, its -20-degree-rotated copy, and the
    hand-marked face box on the rotated frame."""
    from haarscan.geometry import Rect, round_half_up
    from haarscan.image import grid_center, rotate, rotation_matrix

    upright, box = fixture_gen.make_face_plate(face_crop, pos=(160, 100))
    tilted = rotate(upright, -20.0)
    center = grid_center(upright.width, upright.height)
    moved = rotation_matrix(center, -20.0).apply(*box.center)
    marked = Rect(round_half_up(moved[0] - box.w / 2),
                  round_half_up(moved[1] - box.h / 2), box.w, box.h)
    return upright, tilted, marked
