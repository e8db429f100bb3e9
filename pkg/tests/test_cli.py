"""End-to-end tests of the command-line interface (in-process)."""

from __future__ import annotations

import json
import os
import re
import subprocess
import sys

import numpy as np
import pytest

from haarscan import load_image
from haarscan.cli import EXIT_EMPTY, EXIT_ERROR, EXIT_OK, main, _float_list, UsageError

from conftest import EYE_CASCADE_PATH, FACE_CASCADE_PATH

import fixture_gen


def run_cli(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# Parser-level behavior
# ---------------------------------------------------------------------------


def test_no_command_prints_help_and_fails(capsys) -> None:
    code, out, err = run_cli(capsys)
    assert code == EXIT_ERROR
    assert "usage:" in out


def test_unknown_command_is_usage_error(capsys) -> None:
    code, out, err = run_cli(capsys, "frobnicate")
    assert code == EXIT_ERROR
    assert "error:" in err


def test_missing_required_flag_is_exit_1_not_2(capsys) -> None:
    code, out, err = run_cli(capsys, "detect", "--image", "x.pgm")
    assert code == EXIT_ERROR  # argparse would normally exit 2
    assert "error:" in err


def test_version_flag(capsys) -> None:
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert "haarscan" in out
    assert "backend" in out


def test_float_list_parsing() -> None:
    assert _float_list("1,2,4") == (1.0, 2.0, 4.0)
    assert _float_list("0,-15, 15") == (0.0, -15.0, 15.0)
    with pytest.raises(UsageError):
        _float_list("1,abc")
    with pytest.raises(UsageError):
        _float_list(",")


# ---------------------------------------------------------------------------
# detect
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def frame_files(small_set, tmp_path_factory):
    """The small scene set written as individual PGM files."""
    root = tmp_path_factory.mktemp("cli_frames")
    frames = root / "frames"
    gt = root / "gt.jsonl"
    fixture_gen.write_set(small_set, str(frames), str(gt))
    return str(frames), str(gt)


def _detect_args(*extra, image=None, directory=None):
    args = ["detect", "--face-cascade", FACE_CASCADE_PATH,
            "--eye-cascade", EYE_CASCADE_PATH]
    if image:
        args += ["--image", image]
    if directory:
        args += ["--dir", directory]
    return args + list(extra)


def test_detect_single_image_json_line(capsys, frame_files) -> None:
    frames_dir, _ = frame_files
    path = os.path.join(frames_dir, "s000.pgm")
    code, out, err = run_cli(capsys, *_detect_args("--sf", "2", image=path))
    assert code == EXIT_OK
    lines = out.splitlines()
    assert len(lines) == 1
    obj = json.loads(lines[0])
    assert obj["frame_id"] == "s000"
    assert obj["face_present"] is True
    assert len(obj["faces"]) >= 1
    assert obj["eyes_present"] is True and len(obj["eyes"]) == 2
    x, y, w, h = obj["faces"][0]["rect"]
    assert w > 0 and h > 0
    assert set(obj["elapsed"]) == {
        "downsample", "integral", "face_scan", "eye_scan", "tilt_extra"
    }


def test_detect_directory_order_and_out_file(capsys, frame_files, tmp_path) -> None:
    frames_dir, _ = frame_files
    out_path = tmp_path / "results.jsonl"
    code, out, err = run_cli(
        capsys, *_detect_args("--sf", "4", "--out", str(out_path),
                              directory=frames_dir)
    )
    assert code == EXIT_OK
    assert out == ""  # everything went to the file
    lines = out_path.read_text().splitlines()
    ids = [json.loads(ln)["frame_id"] for ln in lines]
    assert ids == [f"s{i:03d}" for i in range(10)]


def test_detect_absent_scene_is_success_with_empty_lists(capsys, frame_files) -> None:
    frames_dir, _ = frame_files
    path = os.path.join(frames_dir, "s001.pgm")
    code, out, _ = run_cli(capsys, *_detect_args("--sf", "2", image=path))
    assert code == EXIT_OK  # zero detections is data, not an error
    obj = json.loads(out)
    assert obj["faces"] == [] and obj["face_present"] is False


def test_detect_invalid_sf(capsys, frame_files) -> None:
    frames_dir, _ = frame_files
    path = os.path.join(frames_dir, "s000.pgm")
    code, out, err = run_cli(capsys, *_detect_args("--sf", "0.5", image=path))
    assert code == EXIT_ERROR
    assert "error:" in err and "0.5" in err


def test_detect_empty_directory(capsys, tmp_path) -> None:
    (tmp_path / "notes.txt").write_text("not a frame")
    code, out, err = run_cli(capsys, *_detect_args(directory=str(tmp_path)))
    assert code == EXIT_EMPTY
    assert "no frames" in err


def test_detect_missing_image(capsys, tmp_path) -> None:
    code, out, err = run_cli(
        capsys, *_detect_args(image=str(tmp_path / "missing.pgm"))
    )
    assert code == EXIT_ERROR
    assert "error:" in err


def test_detect_malformed_cascade(capsys, frame_files, tmp_path) -> None:
    frames_dir, _ = frame_files
    bad = tmp_path / "bad.cascade"
    bad.write_text("CASCADE broken\n")
    code, out, err = run_cli(
        capsys, "detect", "--face-cascade", str(bad),
        "--image", os.path.join(frames_dir, "s000.pgm"),
    )
    assert code == EXIT_ERROR
    assert "error:" in err


@pytest.mark.parametrize(
    "flags",
    [
        ("--threads", "0"),
        ("--min-neighbors", "-1"),
        ("--scale-step", "1.0"),
        ("--tilt-angles", "15,-15"),  # no 0 angle
    ],
)
def test_detect_bad_flag_values_exit_1(capsys, frame_files, flags) -> None:
    frames_dir, _ = frame_files
    path = os.path.join(frames_dir, "s000.pgm")
    code, out, err = run_cli(capsys, *_detect_args(*flags, image=path))
    assert code == EXIT_ERROR
    assert "error:" in err


def _strip_elapsed(line: str) -> dict:
    obj = json.loads(line)
    obj.pop("elapsed")
    return obj


def test_detect_threads_do_not_change_results(capsys, frame_files) -> None:
    frames_dir, _ = frame_files
    _, out_serial, _ = run_cli(
        capsys, *_detect_args("--sf", "4", "--threads", "1", directory=frames_dir)
    )
    _, out_pool, _ = run_cli(
        capsys, *_detect_args("--sf", "4", "--threads", "4", directory=frames_dir)
    )
    serial = [_strip_elapsed(ln) for ln in out_serial.splitlines()]
    pooled = [_strip_elapsed(ln) for ln in out_pool.splitlines()]
    assert serial == pooled


def test_detect_draw_burns_boxes(capsys, frame_files, tmp_path) -> None:
    frames_dir, _ = frame_files
    src = os.path.join(frames_dir, "s000.pgm")
    code, out, _ = run_cli(
        capsys,
        *_detect_args("--sf", "2", "--draw", "--out-dir", str(tmp_path), image=src),
    )
    assert code == EXIT_OK
    burned_path = tmp_path / "s000.det.pgm"
    assert burned_path.exists()
    obj = json.loads(out)
    x, y, w, h = obj["faces"][0]["rect"]
    burned = load_image(burned_path).pixels
    original = load_image(src).pixels
    # 2px border at intensity 255 on every side of the face box.
    assert np.all(burned[y : y + 2, x : x + w] == 255)
    assert np.all(burned[y + h - 2 : y + h, x : x + w] == 255)
    assert np.all(burned[y : y + h, x : x + 2] == 255)
    assert np.all(burned[y : y + h, x + w - 2 : x + w] == 255)
    # Pixels well away from any box are untouched.
    assert np.array_equal(burned[:4, :4], original[:4, :4])


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


def test_bench_flat_directory(capsys, frame_files, tmp_path) -> None:
    frames_dir, _ = frame_files
    code, out, err = run_cli(
        capsys, "bench", "--dir", frames_dir,
        "--face-cascade", FACE_CASCADE_PATH, "--eye-cascade", EYE_CASCADE_PATH,
        "--sf", "2,4", "--out-dir", str(tmp_path),
    )
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "sf,mean_fps"
    assert re.fullmatch(r"2,\d+(\.\d+)?", lines[1])
    assert re.fullmatch(r"4,\d+(\.\d+)?", lines[2])
    for name in ("speed_vs_sf.csv", "speed_per_subject.csv", "speed_vs_sf.svg"):
        assert (tmp_path / name).exists()
    assert "wrote 3 report files" in err


def test_bench_subject_subdirectories(capsys, small_set, tmp_path) -> None:
    frames_root = tmp_path / "subjects"
    for subject, members in (("alpha", small_set[:2]), ("beta", small_set[2:4])):
        fixture_gen.write_set(members, str(frames_root / subject),
                              str(tmp_path / f"{subject}.jsonl"))
    out_dir = tmp_path / "reports"
    code, out, _ = run_cli(
        capsys, "bench", "--dir", str(frames_root),
        "--face-cascade", FACE_CASCADE_PATH,
        "--sf", "4", "--out-dir", str(out_dir),
    )
    assert code == EXIT_OK
    per_subject = (out_dir / "speed_per_subject.csv").read_text().splitlines()
    subjects = [row.split(",")[1] for row in per_subject[1:]]
    assert subjects == ["alpha", "beta"]


def test_bench_empty_directory(capsys, tmp_path) -> None:
    code, out, err = run_cli(
        capsys, "bench", "--dir", str(tmp_path),
        "--face-cascade", FACE_CASCADE_PATH,
        "--sf", "1", "--out-dir", str(tmp_path / "out"),
    )
    assert code == EXIT_EMPTY


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def test_eval_reports_perfect_small_set(capsys, frame_files, tmp_path) -> None:
    frames_dir, gt_path = frame_files
    code, out, err = run_cli(
        capsys, "eval", "--dir", frames_dir, "--gt", gt_path,
        "--face-cascade", FACE_CASCADE_PATH,
        "--sf", "2", "--out-dir", str(tmp_path),
    )
    assert code == EXIT_OK
    # The compact scene set is cleanly separable at this scale.
    assert out.splitlines() == [
        "sf=2 tp=5 fp=0 tn=5 fn=0 tpr=1 fpr=0 accuracy=1"
    ]
    assert (tmp_path / "accuracy_vs_sf.csv").read_text().splitlines() == [
        "sf,accuracy", "2,1"
    ]
    assert (tmp_path / "accuracy_vs_sf.svg").exists()


def test_eval_iou_mode_flags(capsys, frame_files, tmp_path) -> None:
    frames_dir, gt_path = frame_files
    code, out, _ = run_cli(
        capsys, "eval", "--dir", frames_dir, "--gt", gt_path,
        "--face-cascade", FACE_CASCADE_PATH,
        "--sf", "2", "--mode", "iou", "--iou-tau", "0.5",
        "--out-dir", str(tmp_path),
    )
    assert code == EXIT_OK
    m = re.fullmatch(
        r"sf=2 tp=(\d+) fp=(\d+) tn=(\d+) fn=(\d+) tpr=\S+ fpr=\S+ accuracy=\S+",
        out.splitlines()[0],
    )
    assert m
    assert sum(int(g) for g in m.groups()) == 10  # every frame counted once


def test_eval_missing_gt_file(capsys, frame_files, tmp_path) -> None:
    frames_dir, _ = frame_files
    code, out, err = run_cli(
        capsys, "eval", "--dir", frames_dir, "--gt", str(tmp_path / "nope.jsonl"),
        "--face-cascade", FACE_CASCADE_PATH,
        "--sf", "4", "--out-dir", str(tmp_path),
    )
    assert code == EXIT_ERROR
    assert "error:" in err


# ---------------------------------------------------------------------------
# roc
# ---------------------------------------------------------------------------


def test_roc_outputs_curve_files(capsys, frame_files, tmp_path) -> None:
    frames_dir, gt_path = frame_files
    code, out, err = run_cli(
        capsys, "roc", "--dir", frames_dir, "--gt", gt_path,
        "--face-cascade", FACE_CASCADE_PATH,
        "--sf", "2", "--out-dir", str(tmp_path),
    )
    assert code == EXIT_OK
    assert re.fullmatch(r"sf=2 auc=1 points=\d+", out.splitlines()[0])
    rows = (tmp_path / "roc_sf2.csv").read_text().splitlines()
    assert rows[0] == "fpr,tpr,threshold"
    assert (tmp_path / "roc_sf2.svg").exists()
    assert (tmp_path / "auc_vs_sf.csv").read_text().splitlines() == [
        "sf,auc", "2,1"
    ]


def test_roc_single_class_gt_fails_cleanly(capsys, small_set, tmp_path) -> None:
    absent_only = [t for t in small_set if not t[2].face_present][:2]
    frames = tmp_path / "frames"
    gt = tmp_path / "gt.jsonl"
    fixture_gen.write_set(absent_only, str(frames), str(gt))
    code, out, err = run_cli(
        capsys, "roc", "--dir", str(frames), "--gt", str(gt),
        "--face-cascade", FACE_CASCADE_PATH,
        "--sf", "4", "--out-dir", str(tmp_path / "out"),
    )
    assert code == EXIT_ERROR
    assert "positive" in err or "negative" in err


# ---------------------------------------------------------------------------
# annotate-serve argument validation (server behavior tested elsewhere)
# ---------------------------------------------------------------------------


def test_annotate_serve_rejects_missing_dir(capsys, tmp_path) -> None:
    code, out, err = run_cli(
        capsys, "annotate-serve", "--dir", str(tmp_path / "nope"),
        "--gt", str(tmp_path / "gt.jsonl"),
    )
    assert code == EXIT_ERROR
    assert "error:" in err


# ---------------------------------------------------------------------------
# module entry point
# ---------------------------------------------------------------------------


def test_python_dash_m_entry_point() -> None:
    proc = subprocess.run(
        [sys.executable, "-m", "haarscan", "--version"],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0
    assert "haarscan" in proc.stdout
