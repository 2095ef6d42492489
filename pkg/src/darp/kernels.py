"""Route-kernel backend selection.

The compiled Cython kernel is used when it was built; otherwise the
pure-Python reference kernel. ``DARP_KERNEL=python`` forces the fallback.
"""

from __future__ import annotations

import os

from . import _pykernel

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

BACKENDS = {"python": _pykernel.Kernel}
if _ckernel is not None:
    BACKENDS["cython"] = _ckernel.Kernel

_forced = os.environ.get("DARP_KERNEL", "").strip().lower()
if _forced and _forced not in BACKENDS:
    raise ImportError(f"DARP_KERNEL={_forced!r} requested but available backends are {sorted(BACKENDS)}")
DEFAULT_BACKEND = _forced or ("cython" if "cython" in BACKENDS else "python")


def make_kernel(instance, ride_aware: bool = True, backend: str | None = None):
    try:
        cls = BACKENDS[backend or DEFAULT_BACKEND]
    except KeyError:
        raise ValueError(f"unknown kernel backend {backend!r}; have {sorted(BACKENDS)}") from None
    return cls(instance, ride_aware)
