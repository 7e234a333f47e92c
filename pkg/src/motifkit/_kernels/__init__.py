"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the pure
Python twin is the fallback.  MOTIFKIT_KERNELS=py|cy forces a backend
(cy raises if the extension is unavailable).  Both backends implement
the same operations in the same order and return bit-identical results.
"""

from __future__ import annotations

import os

from . import pure

_requested = os.environ.get("MOTIFKIT_KERNELS", "auto")
if _requested not in ("auto", "py", "cy"):
    raise ImportError(f"MOTIFKIT_KERNELS must be auto, py, or cy, not {_requested!r}")

_backend = pure
if _requested in ("auto", "cy"):
    try:
        from . import _speedups as _backend  # type: ignore[no-redef]
    except ImportError:
        if _requested == "cy":
            raise

BACKEND = _backend.BACKEND_NAME
scan = _backend.scan
svm_train = _backend.svm_train


def available_backends() -> dict[str, object]:
    """Importable kernel modules by name, for tests and benchmarks."""
    backends: dict[str, object] = {"py": pure}
    try:
        from . import _speedups

        backends["cy"] = _speedups
    except ImportError:
        pass
    return backends
