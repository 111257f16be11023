"""Hot loops, compiled when the extension is built and pure Python otherwise.

``BACKEND`` names the implementation in use.  Setting the environment
variable MOCKHEEGNER_PURE=1 forces the Python fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    if os.environ.get("MOCKHEEGNER_PURE"):
        raise ImportError("pure Python requested")
    from . import _kernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"

_INT64 = 2**63 - 1

count_fermat = _impl.count_fermat
ap_batch = _impl.ap_batch
an_table = _impl.an_table


def series_mul(a, b, length: int) -> list:
    """Truncated product of integer series, falling back to Python ints on overflow risk."""
    if _impl is _kernels_py or not a or not b:
        return _kernels_py.series_mul(a, b, length)
    bound = max(map(abs, a[:length])) * max(map(abs, b[:length])) * min(len(a), len(b), length)
    if bound > _INT64:
        return _kernels_py.series_mul(a, b, length)
    return _impl.series_mul(a, b, length)
