"""Kernel backend selection.

The pairwise verification kernels in ``_kernels`` exist in two flavours: a
numba ``@njit`` version and a pure-numpy version.  The environment variable
``LOSSGEOM_BACKEND`` picks one:

    LOSSGEOM_BACKEND=numba   force numba (error if unavailable)
    LOSSGEOM_BACKEND=numpy   force the pure-numpy fallback
    unset                    numba when importable, numpy otherwise
"""

import os

_requested = os.environ.get("LOSSGEOM_BACKEND", "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    raise ValueError(
        f"LOSSGEOM_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    numba = None
else:
    try:
        import numba
    except ImportError:
        numba = None
        if _requested == "numba":
            raise

USE_NUMBA = numba is not None


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


def jit(fn):
    """numba.njit when the numba backend is active, identity otherwise."""
    if USE_NUMBA:
        return numba.njit(fn, cache=True)
    return fn
