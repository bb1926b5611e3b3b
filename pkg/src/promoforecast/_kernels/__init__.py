"""Split-search kernel with a compiled core and a NumPy fallback.

The Cython extension is used when importable; set ``PROMOFORECAST_KERNEL``
to ``python`` or ``cython`` to force a backend (``cython`` raises if the
extension is missing). Both backends return bit-identical splits, so the
choice only affects speed. ``benchmarks/bench_kernels.py`` compares them.
"""

from __future__ import annotations

import os

from . import _split_py

_choice = os.environ.get("PROMOFORECAST_KERNEL", "auto").lower()
if _choice not in {"auto", "python", "cython"}:
    raise ValueError(
        f"PROMOFORECAST_KERNEL must be auto, python, or cython; got {_choice!r}"
    )

if _choice == "python":
    ACTIVE_BACKEND = "python"
    best_split = _split_py.best_split
else:
    try:
        from . import _split_cy

        ACTIVE_BACKEND = "cython"
        best_split = _split_cy.best_split
    except ImportError:
        if _choice == "cython":
            raise
        ACTIVE_BACKEND = "python"
        best_split = _split_py.best_split

__all__ = ["best_split", "ACTIVE_BACKEND"]
