"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` module is used. Setting ``SEQDESCENT_PURE_PYTHON=1``
forces the fallback.
"""

import importlib
import os

_MODULES = {"cython": "seqdescent._ckernels", "python": "seqdescent._pykernels"}


def load_backend(name):
    """Import the kernel module for backend ``name`` ("cython" or "python")."""
    if name not in _MODULES:
        raise ValueError(f"unknown kernel backend {name!r}")
    return importlib.import_module(_MODULES[name])


def available_backends():
    names = []
    for name in _MODULES:
        try:
            load_backend(name)
        except ImportError:
            continue
        names.append(name)
    return names


def _select():
    if os.environ.get("SEQDESCENT_PURE_PYTHON", "") not in ("", "0"):
        return load_backend("python")
    try:
        return load_backend("cython")
    except ImportError:
        return load_backend("python")


kernels = _select()
BACKEND = kernels.BACKEND
