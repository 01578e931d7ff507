"""Kernel backend selection.

``LABBUBBLE_BACKEND=numpy`` forces the pure-numpy kernels; the default is
numba when it imports, numpy otherwise.
"""

import os

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

ENV_VAR = "LABBUBBLE_BACKEND"
BACKENDS = ("numba", "numpy")


def resolve_backend(requested=None) -> str:
    name = (requested or os.environ.get(ENV_VAR) or ("numba" if HAVE_NUMBA else "numpy")).lower()
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choose one of {BACKENDS}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return name


if HAVE_NUMBA:
    from numba import njit
else:  # pragma: no cover

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
