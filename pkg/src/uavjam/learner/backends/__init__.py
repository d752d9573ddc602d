"""Kernel backend selection.

Two interchangeable op sets exist: ``numpy_ops`` (pure numpy reference)
and ``_fastops`` (compiled extension).  The environment variable
``UAVJAM_BACKEND`` forces one (``py`` or ``ext``); otherwise the compiled
backend is used when importable and the reference backend silently
otherwise.
"""

from __future__ import annotations

import os


def _load():
    choice = os.environ.get("UAVJAM_BACKEND", "").strip().lower()
    if choice not in ("", "py", "ext"):
        raise ValueError(
            f"UAVJAM_BACKEND must be 'py' or 'ext', got {choice!r}")
    if choice == "py":
        from . import numpy_ops
        return numpy_ops
    try:
        from . import _fastops  # type: ignore[attr-defined]
        return _fastops
    except ImportError:
        if choice == "ext":
            raise ImportError(
                "UAVJAM_BACKEND=ext but the compiled extension is not built")
        from . import numpy_ops
        return numpy_ops


ops = _load()
BACKEND_NAME: str = ops.NAME

__all__ = ["ops", "BACKEND_NAME"]
