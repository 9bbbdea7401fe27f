"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-numpy fallback
carries the same contract and produces bitwise identical results.  Setting
SZWALK_PURE_PYTHON=1 in the environment forces the fallback, which is useful
for benchmarking and for running without a compiler.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("SZWALK_PURE_PYTHON") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

assemble_walk = _impl.assemble_walk
accumulate_walk = _impl.accumulate_walk
