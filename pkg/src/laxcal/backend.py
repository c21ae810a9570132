"""Kernel backend selection.

`LAXCAL_BACKEND=python` forces the pure numpy kernels; `LAXCAL_BACKEND=numba`
forces the jitted ones; the default (`auto`) uses numba when importable.
"""

from __future__ import annotations

import os

from . import _kernels_py


def _load(name: str):
    if name == "python":
        return _kernels_py, "python"
    if name == "numba":
        from . import _kernels_nb

        return _kernels_nb, "numba"
    if name == "auto":
        try:
            from . import _kernels_nb

            return _kernels_nb, "numba"
        except ImportError:
            return _kernels_py, "python"
    raise ValueError(f"unknown LAXCAL_BACKEND {name!r} (expected auto, numba or python)")


_impl, _name = _load(os.environ.get("LAXCAL_BACKEND", "auto"))


def active_backend() -> str:
    return _name


def kernels():
    return _impl


def kernels_for(name: str):
    """Explicit backend access, used by the parity tests and the benchmark."""
    return _load(name)[0]
