"""Kernel backend selection.

The compiled Cython module is used when it was built; otherwise the
pure-Python twin is loaded. ``use_backend`` switches at runtime (tests and the
benchmark exercise both).
"""
from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_active = _compiled if _compiled is not None else _kernels_py


def available_backends():
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "cython")
    return names


def backend_name():
    return "cython" if _active is _compiled and _compiled is not None else "python"


def use_backend(name):
    """Select ``"cython"`` or ``"python"``; returns the previous name."""
    global _active
    previous = backend_name()
    if name == "python":
        _active = _kernels_py
    elif name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not available; reinstall with a C compiler")
        _active = _compiled
    else:
        raise ValueError(f"unknown backend {name!r}")
    return previous


def integrate(*args, **kwargs):
    return _active.integrate(*args, **kwargs)


def adp_recursion(eps, alpha, n):
    return _active.adp_recursion(float(eps), float(alpha), int(n))
