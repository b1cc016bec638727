"""Hot scan kernels with a compiled core and a pure-Python fallback.

The Cython extension ``_ckernels`` is used when it was built; otherwise, or
when ``OGPLAB_PURE_PYTHON=1`` is set, the numpy twin ``_pykernels`` is used.
Both produce identical outputs; ``backend(name)`` returns either explicitly.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_pure = os.environ.get("OGPLAB_PURE_PYTHON", "") not in ("", "0")

kernels: ModuleType = _pykernels if (_pure or _ckernels is None) else _ckernels
BACKEND = "python" if kernels is _pykernels else "cython"


def backend(name: str) -> ModuleType:
    if name == "python":
        return _pykernels
    if name == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not available; build with `pip install -e .`")
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _ckernels is not None else [])
