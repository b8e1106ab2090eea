"""Backend selection for the shortest-path kernels.

The compiled extension is used when it imports cleanly; setting
``FMGT_PURE_PYTHON=1`` forces the heapq fallback.
"""

import os

from . import _kernels_py

BACKENDS = {"python": _kernels_py}

if os.environ.get("FMGT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        BACKENDS["compiled"] = _compiled
        backend = _compiled
        BACKEND_NAME = "compiled"
    else:
        backend = _kernels_py
        BACKEND_NAME = "python"
else:
    backend = _kernels_py
    BACKEND_NAME = "python"

dijkstra = backend.dijkstra
dijkstra_order = backend.dijkstra_order
dijkstra_many = backend.dijkstra_many


def set_backend(name: str):
    """Swap the active backend in place; returns the previous backend name."""
    global backend, BACKEND_NAME, dijkstra, dijkstra_order, dijkstra_many
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable (have {sorted(BACKENDS)})")
    prev = BACKEND_NAME
    backend = BACKENDS[name]
    BACKEND_NAME = name
    dijkstra = backend.dijkstra
    dijkstra_order = backend.dijkstra_order
    dijkstra_many = backend.dijkstra_many
    return prev
