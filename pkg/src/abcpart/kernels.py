"""Select the compiled kernels when available, else the pure-Python ones.

Set ``ABCPART_PURE_PYTHON=1`` to force the fallback.
"""

import os

from abcpart import _pykernels

BACKEND = "python"
_native = None
if os.environ.get("ABCPART_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from abcpart import _ckernels as _native
        BACKEND = "cython"
    except ImportError:
        _native = None

_INT64_SAFE = 1 << 62
_MAX_BITS = 62


def best_subsets(m, k, ballot_masks, sizes, weights, table, backend=None):
    impl = _pick(backend)
    if impl is not _pykernels:
        bound = max((abs(v) for row in table for v in row), default=0) * sum(weights)
        if m > _MAX_BITS or bound >= _INT64_SAFE:
            impl = _pykernels
    return impl.best_subsets(m, k, ballot_masks, sizes, weights, table)


def has_independent_set(n, adj, t, backend=None):
    impl = _pick(backend)
    if n > _MAX_BITS:
        impl = _pykernels
    return impl.has_independent_set(n, adj, t)


def _pick(backend):
    if backend == "python" or _native is None:
        return _pykernels
    return _native
