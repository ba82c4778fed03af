"""Kernel backend selection.

Two interchangeable implementations of the inner-loop kernels exist: the
Cython extension ``_speedups`` and the pure-numpy ``py_kernels``.  They
consume the same pre-drawn random-variate arrays and produce bit-identical
results, so the choice is purely about speed.

Selection order: the ``WEALTHNET_BACKEND`` environment variable ("compiled"
or "python") if set, else the compiled extension when built, else the
python fallback.  ``use()`` switches at runtime.
"""

import os

from . import py_kernels

try:
    from . import _speedups
except ImportError:
    _speedups = None

_BACKENDS = {"python": py_kernels}
if _speedups is not None:
    _BACKENDS["compiled"] = _speedups


def _select_default():
    requested = os.environ.get("WEALTHNET_BACKEND")
    if requested is not None:
        if requested not in ("python", "compiled"):
            raise ValueError(
                f"WEALTHNET_BACKEND={requested!r}: expected 'python' or 'compiled'"
            )
        if requested not in _BACKENDS:
            raise ImportError(
                "WEALTHNET_BACKEND=compiled but the extension "
                "wealthnet.backend._speedups is not built"
            )
        return _BACKENDS[requested]
    return _BACKENDS.get("compiled", py_kernels)


_active = _select_default()


def active():
    """The currently selected kernel module."""
    return _active


def name():
    return _active.name


def available():
    """Names of the backends importable in this environment."""
    return tuple(sorted(_BACKENDS))


def use(backend_name):
    """Switch backends; returns the name of the previously active one."""
    global _active
    if backend_name not in _BACKENDS:
        raise ValueError(
            f"unknown backend {backend_name!r}; available: {available()}"
        )
    previous = _active.name
    _active = _BACKENDS[backend_name]
    return previous
