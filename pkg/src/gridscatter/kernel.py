"""Round-kernel selection: compiled extension when built, pure Python otherwise.

Set ``GRIDSCATTER_PURE_PYTHON=1`` to force the pure-Python path.
"""

from __future__ import annotations

import os
from collections.abc import Sequence

from ._kernel_py import decide_all as decide_all_python

try:
    from ._kernel import decide_all as decide_all_compiled
except ImportError:  # extension not built
    decide_all_compiled = None

if os.environ.get("GRIDSCATTER_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    _compiled = decide_all_compiled

BACKEND = "cython" if _compiled is not None else "python"


def decide_all(xs: Sequence[int], ys: Sequence[int]):
    """``(labels, go, tx, ty)`` for every robot observing the same snapshot."""
    if _compiled is not None:
        out = _compiled(xs, ys)
        if out is not None:
            return out
    return decide_all_python(xs, ys)
