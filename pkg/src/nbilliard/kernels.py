"""Pick the batch simulator: the compiled one if it was built, numpy otherwise.

Set ``NBILLIARD_PURE_PYTHON=1`` to force the numpy version.
"""
from __future__ import annotations

import os

from . import _pykernels

ESCAPED = _pykernels.ESCAPED
MAX_EVENTS = _pykernels.MAX_EVENTS
DEGENERATE = _pykernels.DEGENERATE

HAVE_COMPILED = False
if not os.environ.get("NBILLIARD_PURE_PYTHON"):
    try:
        from . import _ckernels
    except ImportError:
        _ckernels = None
    else:
        HAVE_COMPILED = True
else:
    _ckernels = None

BACKEND = "cython" if HAVE_COMPILED else "numpy"


def simulate_batch(starts, vels, perps, max_events, min_advance=1e-9, on_wall=1e-9, tangential=1e-10, backend=None):
    backend = backend or BACKEND
    if backend == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernel not available")
        return _ckernels.simulate_batch(starts, vels, perps, int(max_events), min_advance, on_wall, tangential)
    if backend != "numpy":
        raise ValueError(f"unknown backend {backend!r}")
    return _pykernels.simulate_batch(starts, vels, perps, max_events, min_advance, on_wall, tangential)
