"""Hot-loop kernels, compiled when available.

The Cython extension ``matraj._kernels`` is used if it was built; otherwise
the numpy implementations in ``matraj._kernels_py`` are used. Set
``MATRAJ_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("MATRAJ_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

scan_1d = _impl.scan_1d
dp_tables = _impl.dp_tables

__all__ = ["BACKEND", "scan_1d", "dp_tables"]
