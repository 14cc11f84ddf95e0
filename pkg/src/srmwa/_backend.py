"""Kernel selection.

The compiled kernel is used when importable. Set ``SRMWA_BACKEND=python`` to
force the pure-Python one (``=compiled`` makes a missing extension an error).
"""

import os

from . import _pykernel

_choice = os.environ.get("SRMWA_BACKEND", "auto").lower()

compiled = None
if _choice != "python":
    try:
        from . import _kernel as compiled
    except ImportError:
        if _choice == "compiled":
            raise

KERNELS = {"python": _pykernel.advance}
if compiled is not None:
    KERNELS["compiled"] = compiled.advance

BACKEND = "compiled" if compiled is not None else "python"
advance = KERNELS[BACKEND]


def get_kernel(name: str | None = None):
    if name is None:
        return advance
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {sorted(KERNELS)}") from None
