"""Backend selection for the RK4 kernels.

The compiled ``_rk4`` extension is used when it imports; otherwise the numpy
fallback in ``_rk4_py`` takes over. Set ``GEOGATE_PURE_PYTHON=1`` to force
the fallback.
"""

from __future__ import annotations

import os

from . import _rk4_py

_compiled = None
if not os.environ.get("GEOGATE_PURE_PYTHON"):
    try:
        from . import _rk4 as _compiled
    except ImportError:
        _compiled = None

BACKENDS = {"python": _rk4_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled

BACKEND = "cython" if _compiled is not None else "python"
_active = BACKENDS[BACKEND]

lindblad_rk4 = _active.lindblad_rk4
schrodinger_rk4 = _active.schrodinger_rk4


def get_backend(name: str):
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
