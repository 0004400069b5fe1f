"""Numeric kernels, compiled when available.

The Cython build (``rdnsgeo._kernels``) is used if it imports; otherwise the
NumPy implementation in ``rdnsgeo._kernels_py`` takes over. Set
``RDNSGEO_PURE_PYTHON=1`` to force the fallback.
"""

import importlib
import logging
import os

log = logging.getLogger(__name__)


def load_backend(name=None):
    """Return the kernel module for ``name`` ("cython" or "python").

    With no name, prefer the compiled module and fall back silently.
    """
    if name == "python":
        return importlib.import_module("rdnsgeo._kernels_py")
    if name == "cython":
        return importlib.import_module("rdnsgeo._kernels")
    if name is not None:
        raise ValueError(f"unknown kernel backend {name!r}")
    if os.environ.get("RDNSGEO_PURE_PYTHON"):
        return load_backend("python")
    try:
        return load_backend("cython")
    except ImportError:
        log.debug("compiled kernels unavailable, using numpy fallback")
        return load_backend("python")


_impl = load_backend()

BACKEND = _impl.BACKEND
haversine = _impl.haversine
haversine_many = _impl.haversine_many
nearest_index = _impl.nearest_index
densest_center = _impl.densest_center
loss_and_grad = _impl.loss_and_grad
gradient_descent = _impl.gradient_descent
