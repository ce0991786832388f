"""Backend selection for the hot stepping kernels.

The corner-flow integrator in ``_kernels.py`` is written in scalar numpy
style so the identical source either compiles under numba or runs as plain
Python.  Selection happens once at import time via the environment variable

    CORNERIMPACT_BACKEND = auto | numba | numpy

``auto`` (default) uses numba when it imports cleanly and silently falls
back to pure Python otherwise.  Forcing ``numba`` on a machine without it
warns and falls back rather than failing: the numerical results are
identical, only the speed differs.
"""
from __future__ import annotations

import os
import warnings

_choice = os.environ.get("CORNERIMPACT_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    warnings.warn(
        f"CORNERIMPACT_BACKEND={_choice!r} not recognised; using 'auto'",
        RuntimeWarning,
        stacklevel=2,
    )
    _choice = "auto"

HAS_NUMBA = False
if _choice in ("auto", "numba"):
    try:
        import numba

        HAS_NUMBA = True
    except ImportError:
        if _choice == "numba":
            warnings.warn(
                "CORNERIMPACT_BACKEND=numba but numba is not importable; "
                "falling back to pure Python",
                RuntimeWarning,
                stacklevel=2,
            )

USE_NUMBA = HAS_NUMBA and _choice in ("auto", "numba")
BACKEND = "numba" if USE_NUMBA else "numpy"


def jit(func):
    """Compile ``func`` with numba when selected, else return it unchanged."""
    if USE_NUMBA:
        return numba.njit(func, cache=True)
    return func
