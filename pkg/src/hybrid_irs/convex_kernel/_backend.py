"""Kernel backend selection.

The compiled extension is used when it imports; setting
``HYBRID_IRS_PURE_PYTHON=1`` forces the pure-Python kernels.
"""
import os

from ..errors import InvalidArgumentError
from . import _kernels_py

BACKENDS = {"python": _kernels_py}

if os.environ.get("HYBRID_IRS_PURE_PYTHON") != "1":
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    else:
        BACKENDS["compiled"] = _compiled

DEFAULT_BACKEND = "compiled" if "compiled" in BACKENDS else "python"


def get_backend(name=None):
    """Return the kernel module registered under ``name`` (default: best available)."""
    if name is None:
        name = DEFAULT_BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise InvalidArgumentError(f"unknown or unavailable kernel backend {name!r}; have {sorted(BACKENDS)}") from None
