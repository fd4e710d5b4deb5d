"""Backend selection for the Monte Carlo loop.

The compiled extension is used when it was built and importable; setting
``PRIVCACHE_PURE_PYTHON=1`` forces the numpy implementation.
"""

from __future__ import annotations

import os

from . import _mc_kernel_py

PURE_PYTHON_ENV = "PRIVCACHE_PURE_PYTHON"

_compiled = None
if os.environ.get(PURE_PYTHON_ENV, "") not in ("1", "true", "yes"):
    try:
        from . import _mc_kernel as _compiled
    except ImportError:
        _compiled = None

BACKENDS = {"python": _mc_kernel_py.run_batch}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled.run_batch

BACKEND = "compiled" if _compiled is not None else "python"
run_batch = BACKENDS[BACKEND]


def get_backend(name: str | None = None):
    """Return ``(name, run_batch)``; ``None`` means the default selected at import."""
    name = name or BACKEND
    try:
        return name, BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} is not available (have {sorted(BACKENDS)})") from None
