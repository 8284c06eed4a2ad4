"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` module. Setting ``AUBALANCE_PURE_PYTHON=1`` forces
the fallback. Both expose ``evaluate``, ``descend`` and ``anneal`` with
identical signatures and bit-identical results.
"""
import os

from . import _pykernels

try:
    if os.environ.get("AUBALANCE_PURE_PYTHON"):
        raise ImportError("pure-Python backend forced")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

BACKEND = "cython" if _ckernels is not None else "python"


def get_backend(name=None):
    """Kernel module by name; ``None`` returns the active default."""
    if name is None:
        name = BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} unavailable (have {sorted(BACKENDS)})") from None
