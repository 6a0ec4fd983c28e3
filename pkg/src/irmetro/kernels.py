"""Kernel selection: compiled extension when available, pure Python otherwise.

Set IRMETRO_PURE=1 to force the fallback (useful for benchmarking and for
ruling the extension out when chasing a bug).
"""

from __future__ import annotations

import os

if os.environ.get("IRMETRO_PURE"):
    from . import _twinmerge_py as _impl
else:
    try:
        from . import _twinmerge as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _twinmerge_py as _impl

twin_merge_partition = _impl.twin_merge_partition
KERNEL_BACKEND: str = _impl.BACKEND
