"""Kernel backend selection.

The hot inner loops (event thinning, cascade sampling) are numba-jitted by
default. Set BUFFERHAWKES_NUMBA=0 to force the pure-Python reference kernels;
both backends draw from the same splitmix64 stream and produce identical
output for a given seed.
"""

from __future__ import annotations

import os

from . import _kernels_py

_flag = os.environ.get("BUFFERHAWKES_NUMBA", "1")

if _flag != "0":
    try:
        from . import _kernels_nb as kernels
    except ImportError:  # numba not installed
        kernels = _kernels_py
else:
    kernels = _kernels_py


def backend_name() -> str:
    return "numba" if kernels.__name__.endswith("_nb") else "python"
