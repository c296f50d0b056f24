"""Hot inner loops with a compiled implementation chosen at import time.

``_kernels`` is a Cython extension built from ``_kernels.pyx``; when it is not
available (no compiler, or ``CEFASOLVE_PURE=1`` in the environment) the
pure-Python versions in ``_kernels_py`` are used.  Both expose the same
functions with identical results.
"""

from __future__ import annotations

import os

from . import _kernels_py as pure

if os.environ.get("CEFASOLVE_PURE"):
    impl = pure
    COMPILED = False
else:
    try:
        from . import _kernels as impl  # type: ignore[attr-defined,no-redef]
        COMPILED = True
    except ImportError:  # pragma: no cover - depends on the build
        impl = pure
        COMPILED = False

combine = impl.combine
eliminate_column = impl.eliminate_column

__all__ = ["COMPILED", "combine", "eliminate_column", "impl", "pure"]
