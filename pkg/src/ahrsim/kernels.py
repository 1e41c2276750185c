"""Select the compiled scheduling kernels when available, else pure Python.

Set ``AHRSIM_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("AHRSIM_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND: str = _impl.BACKEND
EventQueue = _impl.EventQueue
ReadyFifo = _impl.ReadyFifo
arbitrate = _impl.arbitrate
critical_path = _impl.critical_path


def available_backends() -> dict:
    """Map backend name to kernel module for every backend importable here."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out
