"""Backend selection for the numeric kernels.

The numba backend is used when numba imports cleanly, unless the environment
variable ``LEARNSUPPORT_BACKEND`` is set to ``numpy``.  Both backends expose the
same functions; ``get_backend(name)`` returns either one explicitly.
"""
import os
import types

from . import numpy_impl

_NAMES = ("horner3", "alias_build", "alias_counts", "poisson_inversion",
          "poisson_ptrs", "interval_sums")


def _load_numba():
    try:
        from . import numba_impl
    except ImportError:
        return None
    return numba_impl


def get_backend(name: str) -> types.SimpleNamespace:
    if name == "numpy":
        mod = numpy_impl
    elif name == "numba":
        mod = _load_numba()
        if mod is None:
            raise ImportError("numba backend requested but numba is not importable")
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    ns = types.SimpleNamespace(name=name)
    for fn in _NAMES:
        setattr(ns, fn, getattr(mod, fn))
    return ns


def _default_name() -> str:
    requested = os.environ.get("LEARNSUPPORT_BACKEND", "").strip().lower()
    if requested in ("numpy", "pure", "0", "off"):
        return "numpy"
    if requested == "numba":
        return "numba"
    return "numba" if _load_numba() is not None else "numpy"


backend = get_backend(_default_name())
