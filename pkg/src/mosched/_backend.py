"""Pick the compiled search kernels when available.

Set ``MOSCHED_BACKEND=python`` to force the pure-Python fallback.
"""

from __future__ import annotations

import os

from . import _pysearch

try:
    from . import _csearch
except ImportError:  # extension not built
    _csearch = None

_KERNELS = {"python": _pysearch}
if _csearch is not None:
    _KERNELS["compiled"] = _csearch


def available() -> list[str]:
    return sorted(_KERNELS)


def default_name() -> str:
    wanted = os.environ.get("MOSCHED_BACKEND", "").strip().lower()
    if wanted:
        if wanted not in _KERNELS:
            raise ValueError(f"backend {wanted!r} not available (have {available()})")
        return wanted
    return "compiled" if "compiled" in _KERNELS else "python"


def kernels(name: str | None = None):
    return _KERNELS[name or default_name()]
