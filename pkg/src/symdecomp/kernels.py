"""Table kernels with a compiled fast path.

The Cython extension ``symdecomp._kernels`` is used when it was built;
otherwise the numpy implementation in ``symdecomp._kernels_py`` is used.
Set ``SYMDECOMP_PURE=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("SYMDECOMP_PURE"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

eval_all = _impl.eval_all
residual_classes = _impl.residual_classes

__all__ = ["BACKEND", "eval_all", "residual_classes"]
