"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback
is used otherwise.  ``HAARSCAN_BACKEND=python|cython`` forces a choice
(useful for the backend-comparison benchmark and for debugging).
Both backends produce bit-identical results by contract.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels  # type: ignore[attr-defined]
    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on build environment
    _kernels = None  # type: ignore[assignment]
    HAVE_COMPILED = False


def _select():
    forced = os.environ.get("HAARSCAN_BACKEND", "").strip().lower()
    if forced == "python":
        return _kernels_py
    if forced == "cython":
        if not HAVE_COMPILED:
            raise ImportError(
                "HAARSCAN_BACKEND=cython requested but the compiled "
                "extension is not available; reinstall with a C toolchain")
        return _kernels
    if forced:
        raise ValueError(f"unknown HAARSCAN_BACKEND value: {forced!r}")
    return _kernels if HAVE_COMPILED else _kernels_py


kernels = _select()
BACKEND_NAME: str = kernels.BACKEND_NAME


def get_kernels(name: str | None = None):
    """Return a kernel module by name ('python' or 'cython'),
    or the active default when name is None."""
    if name is None:
        return kernels
    if name == "python":
        return _kernels_py
    if name == "cython":
        if not HAVE_COMPILED:
            raise ImportError("compiled kernels not available")
        return _kernels
    raise ValueError(f"unknown backend: {name!r}")
