"""Dispatch kernel backend selection.

Prefers the compiled kernel, falls back to the pure-Python one when the
extension is absent. Set ``PEMC_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("PEMC_PURE_PYTHON"):
    from ._dispatch_py import run_dispatch

    BACKEND = "python"
else:
    try:
        from ._dispatch_cy import run_dispatch  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from ._dispatch_py import run_dispatch  # type: ignore[no-redef]

        BACKEND = "python"

__all__ = ["run_dispatch", "BACKEND"]
