"""Backend selection for the sparse polynomial kernel.

The compiled extension is used when it was built and ``CONSLAW_PURE_PYTHON``
is unset; otherwise the pure-Python module is used.  Both give identical
results.
"""
from __future__ import annotations

import os

if os.environ.get("CONSLAW_PURE_PYTHON"):
    from ._purepoly import *  # noqa: F401,F403
    from ._purepoly import BACKEND
else:
    try:
        from ._fastpoly import *  # noqa: F401,F403
        from ._fastpoly import BACKEND
    except ImportError:
        from ._purepoly import *  # noqa: F401,F403
        from ._purepoly import BACKEND

__all__ = [
    "BACKEND",
    "mono_mul",
    "mono_pow",
    "mono_inv",
    "mono_exponent",
    "mono_with",
    "poly_add",
    "poly_sub",
    "poly_scale",
    "poly_iadd_term",
    "poly_mul_term",
    "poly_mul",
    "row_combine",
]
