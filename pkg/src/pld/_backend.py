"""Select the flow-kernel implementation at import.

The compiled ``_flows`` extension is preferred; ``PLD_PURE_PYTHON=1`` or a
missing build selects the pure-Python mirror.  Both expose ``field`` and
``rk4`` with identical signatures.
"""

import os

from . import _flows_py

try:
    from . import _flows as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _flows_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

if _compiled is not None and not os.environ.get("PLD_PURE_PYTHON"):
    NAME = "compiled"
else:
    NAME = "python"

impl = BACKENDS[NAME]

MODEL_IDS = {"lorenz": 0, "euler": 1}
MODEL_DIMS = {"lorenz": 4, "euler": 3}


def get(name=None):
    """Return the kernel module ``name`` (default: the selected one)."""
    if name is None:
        return impl
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
