"""Kernel backend selection.

The compiled extension (``hamcol._speedups``) is preferred when it
imported cleanly; otherwise the pure-Python kernels are used.  Set
``HAMCOL_PURE=1`` to force the fallback (useful for the benchmark and
for the cross-backend equality tests).
"""

import os

_force_pure = os.environ.get("HAMCOL_PURE", "").strip() not in ("", "0")

if _force_pure:
    from . import _kernels_py as _impl
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND_NAME

hitting_chunk_directed = _impl.hitting_chunk_directed
hitting_chunk_undirected = _impl.hitting_chunk_undirected
col_run = _impl.col_run
col_orient_run = _impl.col_orient_run
find_cycle_core = _impl.find_cycle_core
