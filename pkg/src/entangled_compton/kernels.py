"""Backend selection for the hot integral kernels.

The compiled extension is used when it is importable.  Setting the
environment variable ``ECOMPTON_BACKEND=python`` forces the numpy fallback,
``ECOMPTON_BACKEND=compiled`` makes a missing extension an import error.
"""

import os

from . import _kernels_py

BACKEND_ENV = "ECOMPTON_BACKEND"

_requested = os.environ.get(BACKEND_ENV, "auto").strip().lower()
if _requested not in ("auto", "python", "compiled"):
    raise ImportError(f"{BACKEND_ENV} must be auto, python or compiled, got {_requested!r}")

_compiled = None
if _requested != "python":
    try:
        from . import _kernels_c as _compiled
    except ImportError:
        if _requested == "compiled":
            raise

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

ACTIVE = "compiled" if _compiled is not None else "python"


def get_backend(name=None):
    """Kernel module by name; ``None`` gives the active backend."""
    name = ACTIVE if name is None else name
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available") from None
