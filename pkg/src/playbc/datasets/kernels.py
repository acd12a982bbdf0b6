"""Warp kernel backend selection.

Prefers the compiled Cython kernel when it was built; otherwise falls back
to the pure-numpy implementation. Set PLAYBC_DISABLE_EXT=1 to force the
fallback (used by the parity tests and the benchmark).
"""

from __future__ import annotations

import os

from playbc.datasets import _warp_numpy

if os.environ.get("PLAYBC_DISABLE_EXT") == "1":
    _impl = _warp_numpy
    BACKEND = "numpy"
else:
    try:
        from playbc.datasets import _warp_cython as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _warp_numpy
        BACKEND = "numpy"

warp_affine = _impl.warp_affine

numpy_warp_affine = _warp_numpy.warp_affine  # always available, for comparisons
