"""Backend selection for the statevector kernels.

Two interchangeable implementations exist: explicit loops compiled with
numba (default) and a vectorized numpy path. Set ``QCAMSIM_DISABLE_NUMBA=1``
before import to force numpy, or call :func:`set_backend` at runtime.
If numba cannot be imported the numpy path is used automatically.
"""

import logging
import os

from . import _kernels_numpy

log = logging.getLogger(__name__)

try:
    from . import _kernels_numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _kernels_numba = None

BACKENDS = {"numpy": _kernels_numpy}
if _kernels_numba is not None:
    BACKENDS["numba"] = _kernels_numba


def _default_backend():
    flag = os.environ.get("QCAMSIM_DISABLE_NUMBA", "").strip().lower()
    if flag in ("1", "true", "yes", "on") or "numba" not in BACKENDS:
        return "numpy"
    return "numba"


_active = _default_backend()


def set_backend(name):
    """Switch the kernel backend ('numba' or 'numpy') for subsequent gates."""
    global _active
    if name not in BACKENDS:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {sorted(BACKENDS)}")
    _active = name
    log.debug("kernel backend set to %s", name)


def get_backend():
    return _active


def backend():
    """The active kernel module."""
    return BACKENDS[_active]
