"""Hot numerical kernels with a compiled core and a numpy fallback.

The compiled extension is picked at import when it is importable and the
environment variable ``DEFORMQM_PURE`` is unset or ``0``. ``BACKEND``
names the active implementation; both are importable explicitly for
testing and benchmarking via :func:`get_backend`.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

__all__ = ["BACKEND", "direct_fourier_sum", "fd_weights", "derivative_matrix",
           "get_backend", "available_backends"]


def available_backends():
    return ["compiled", "python"] if _ckernels is not None else ["python"]


def get_backend(name):
    if name == "compiled":
        if _ckernels is None:
            raise ImportError("compiled kernels are not built")
        return _ckernels
    if name == "python":
        return _pykernels
    raise ValueError(f"unknown kernel backend {name!r}")


if _ckernels is not None and os.environ.get("DEFORMQM_PURE", "0") in ("", "0"):
    BACKEND = "compiled"
else:
    BACKEND = "python"

_impl = get_backend(BACKEND)
direct_fourier_sum = _impl.direct_fourier_sum
fd_weights = _impl.fd_weights
derivative_matrix = _impl.derivative_matrix
